#include "csmri/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace csmri::io {

namespace {

struct Header
{
  DatasetKind kind;
  std::uint32_t nv, nh, nt, nc;
};

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v)
{
  for (int b = 0; b < 4; ++b) { out.push_back(std::uint8_t((v >> (8 * b)) & 0xff)); }
}

auto get_u32(std::uint8_t const *p) -> std::uint32_t
{
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

auto narrow_extent(Index n) -> std::uint32_t
{
  if (n < 1 || n > Index(UINT32_MAX)) { throw Error(fmt::format("extent {} does not fit the file format", n)); }
  return std::uint32_t(n);
}

void put_header(std::vector<std::uint8_t> &out, DatasetKind kind, Index nv, Index nh, Index nt, Index nc)
{
  for (char ch : {'C', 'S', 'K', '1'}) { out.push_back(std::uint8_t(ch)); }
  out.push_back(std::uint8_t(kind));
  out.insert(out.end(), 3, 0);
  put_u32(out, narrow_extent(nv));
  put_u32(out, narrow_extent(nh));
  put_u32(out, narrow_extent(nt));
  put_u32(out, narrow_extent(nc));
}

void put_complex(std::vector<std::uint8_t> &out, Cx const *data, Index n)
{
  out.reserve(out.size() + size_t(n) * 8);
  for (Index i = 0; i < n; ++i) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(data[i].real())));
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(data[i].imag())));
  }
}

void put_mask(std::vector<std::uint8_t> &out, SamplingMask const &m)
{
  put_header(out, DatasetKind::Mask, m.nv(), 1, m.nt(), 1);
  auto bytes = m.bytes();
  out.insert(out.end(), bytes.begin(), bytes.end());
}

void write_bytes(std::filesystem::path const &path, std::vector<std::uint8_t> const &bytes)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) { throw Error(fmt::format("cannot open {} for writing", path.string())); }
  f.write(reinterpret_cast<char const *>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) { throw Error(fmt::format("write to {} failed", path.string())); }
}

auto read_bytes(std::filesystem::path const &path) -> std::vector<std::uint8_t>
{
  std::ifstream f(path, std::ios::binary);
  if (!f) { throw Error(fmt::format("cannot open {} for reading", path.string())); }
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class Reader
{
public:
  Reader(std::filesystem::path path, std::vector<std::uint8_t> bytes)
    : path_{std::move(path)}
    , bytes_{std::move(bytes)}
  {
  }

  auto remaining() const -> size_t { return bytes_.size() - pos_; }
  auto offset() const -> size_t { return pos_; }

  auto header() -> Header
  {
    size_t const at = pos_;
    need(header_bytes, "header");
    if (std::memcmp(bytes_.data() + at, "CSK1", 4) != 0) {
      throw fail(at, fmt::format("bad magic '{}', expected 'CSK1'", printable(at, 4)));
    }
    std::uint8_t const kind = bytes_[at + 4];
    if (kind < 1 || kind > 4) { throw fail(at + 4, fmt::format("unknown dataset kind {}", kind)); }
    for (size_t i = 5; i < 8; ++i) {
      if (bytes_[at + i] != 0) { throw fail(at + i, "nonzero header padding"); }
    }
    Header h{DatasetKind(kind), get_u32(&bytes_[at + 8]), get_u32(&bytes_[at + 12]), get_u32(&bytes_[at + 16]),
             get_u32(&bytes_[at + 20])};
    for (int i = 0; i < 4; ++i) {
      if (get_u32(&bytes_[at + 8 + 4 * i]) == 0) { throw fail(at + 8 + 4 * i, "zero extent"); }
    }
    pos_ += header_bytes;
    return h;
  }

  void complex(Cx *dst, Index n)
  {
    need(size_t(n) * 8, "payload");
    for (Index i = 0; i < n; ++i) {
      float const re = std::bit_cast<float>(get_u32(&bytes_[pos_]));
      float const im = std::bit_cast<float>(get_u32(&bytes_[pos_ + 4]));
      if (!std::isfinite(re) || !std::isfinite(im)) { throw fail(pos_, "non-finite sample"); }
      dst[i] = Cx{re, im};
      pos_ += 8;
    }
  }

  auto mask_payload(Header const &h) -> SamplingMask
  {
    if (h.nh != 1 || h.nc != 1) { throw fail(pos_ - header_bytes, "mask block must have n_h = n_c = 1"); }
    need(size_t(h.nv) * h.nt, "payload");
    SamplingMask m(h.nv, h.nt);
    for (Index t = 0; t < Index(h.nt); ++t) {
      for (Index v = 0; v < Index(h.nv); ++v) {
        std::uint8_t const b = bytes_[pos_];
        if (b > 1) { throw fail(pos_, fmt::format("mask byte {} is not 0 or 1", b)); }
        m.set(v, t, b == 1);
        ++pos_;
      }
    }
    return m;
  }

  void expect_end()
  {
    if (remaining() != 0) { throw fail(pos_, fmt::format("{} unexpected trailing bytes", remaining())); }
  }

  auto fail(size_t at, std::string const &what) const -> Error
  {
    return Error(fmt::format("{}: {} (byte offset {})", path_.string(), what, at));
  }

private:
  void need(size_t n, char const *what)
  {
    if (remaining() < n) {
      throw fail(pos_, fmt::format("truncated {}: need {} bytes, {} available", what, n, remaining()));
    }
  }

  auto printable(size_t at, size_t n) const -> std::string
  {
    std::string s;
    for (size_t i = 0; i < n; ++i) {
      char const ch = char(bytes_[at + i]);
      s += (ch >= 32 && ch < 127) ? ch : '?';
    }
    return s;
  }

  std::filesystem::path path_;
  std::vector<std::uint8_t> bytes_;
  size_t pos_ = 0;
};

} // namespace

void write_dataset(std::filesystem::path const &path, ImageSequence const &x)
{
  std::vector<std::uint8_t> out;
  put_header(out, DatasetKind::Image, x.nv(), x.nh(), x.frames(), 1);
  put_complex(out, x.data(), x.size());
  write_bytes(path, out);
}

void write_dataset(std::filesystem::path const &path, KSpaceData const &y)
{
  Dims const &d = y.dims();
  std::vector<std::uint8_t> out;
  put_header(out, DatasetKind::KSpace, d.nv, d.nh, d.nt, d.nc);
  put_complex(out, y.data(), y.size());
  put_mask(out, y.mask());
  write_bytes(path, out);
}

void write_dataset(std::filesystem::path const &path, CoilSensitivities const &s)
{
  std::vector<std::uint8_t> out;
  put_header(out, DatasetKind::Sensitivities, s.nv(), s.nh(), 1, s.coils());
  put_complex(out, s.data(), s.size());
  write_bytes(path, out);
}

void write_dataset(std::filesystem::path const &path, SamplingMask const &m)
{
  std::vector<std::uint8_t> out;
  put_mask(out, m);
  write_bytes(path, out);
}

auto read_dataset(std::filesystem::path const &path, std::optional<SamplingMask> const &mask) -> Dataset
{
  Reader in(path, read_bytes(path));
  Header const h = in.header();
  switch (h.kind) {
  case DatasetKind::Image: {
    if (h.nc != 1) { throw in.fail(20, "image must have n_c = 1"); }
    ImageSequence x(h.nv, h.nh, h.nt);
    in.complex(x.data(), x.size());
    in.expect_end();
    return x;
  }
  case DatasetKind::Sensitivities: {
    if (h.nt != 1) { throw in.fail(16, "sensitivities must have n_t = 1"); }
    CoilSensitivities s(h.nv, h.nh, h.nc);
    in.complex(s.data(), s.size());
    in.expect_end();
    return s;
  }
  case DatasetKind::Mask: {
    SamplingMask m = in.mask_payload(h);
    in.expect_end();
    return m;
  }
  case DatasetKind::KSpace: {
    Dims const d{h.nv, h.nh, h.nt, h.nc};
    std::vector<Cx> samples(static_cast<size_t>(d.nv * d.nh * d.nt * d.nc));
    size_t const payload_at = in.offset();
    in.complex(samples.data(), Index(samples.size()));
    std::optional<SamplingMask> embedded;
    if (in.remaining() > 0) {
      size_t const at = in.offset();
      Header const mh = in.header();
      if (mh.kind != DatasetKind::Mask) { throw in.fail(at + 4, "k-space trailer must be a mask block"); }
      embedded = in.mask_payload(mh);
      in.expect_end();
      if (embedded->nv() != d.nv || embedded->nt() != d.nt) { throw in.fail(at + 8, "embedded mask extents do not match k-space"); }
    }
    if (embedded && mask && !(*embedded == *mask)) { throw in.fail(payload_at, "embedded mask disagrees with the supplied mask"); }
    if (!embedded && !mask) { throw in.fail(in.offset(), "k-space file has no embedded mask and none was supplied"); }
    SamplingMask const &m = embedded ? *embedded : *mask;
    KSpaceData y(d, m);
    std::copy(samples.begin(), samples.end(), y.data());
    for (Index t = 0; t < d.nt; ++t) {
      for (Index v = 0; v < d.nv; ++v) {
        if (m.kept(v, t)) { continue; }
        for (Index c = 0; c < d.nc; ++c) {
          for (Index hh = 0; hh < d.nh; ++hh) {
            if (y(v, hh, c, t) != Cx{}) {
              Index const idx = v + d.nv * (hh + d.nh * (c + d.nc * t));
              throw in.fail(payload_at + size_t(idx) * 8, fmt::format("nonzero sample in unsampled row (v={}, t={})", v, t));
            }
          }
        }
      }
    }
    return y;
  }
  }
  throw in.fail(4, "unknown dataset kind");
}

namespace {
template <typename T>
auto read_as(std::filesystem::path const &path, char const *what, std::optional<SamplingMask> const &mask = std::nullopt) -> T
{
  Dataset ds = read_dataset(path, mask);
  if (auto *p = std::get_if<T>(&ds)) { return std::move(*p); }
  throw Error(fmt::format("{}: expected a {} dataset", path.string(), what));
}
} // namespace

auto read_image(std::filesystem::path const &path) -> ImageSequence
{
  return read_as<ImageSequence>(path, "image");
}

auto read_sensitivities(std::filesystem::path const &path) -> CoilSensitivities
{
  return read_as<CoilSensitivities>(path, "sensitivity");
}

auto read_mask(std::filesystem::path const &path) -> SamplingMask
{
  return read_as<SamplingMask>(path, "mask");
}

auto read_kspace(std::filesystem::path const &path, std::optional<SamplingMask> const &mask) -> KSpaceData
{
  return read_as<KSpaceData>(path, "k-space", mask);
}

void write_trace(std::filesystem::path const &path, SolverTrace const &trace, std::vector<std::string> const &comments)
{
  std::ofstream f(path, std::ios::trunc);
  if (!f) { throw Error(fmt::format("cannot open {} for writing", path.string())); }
  for (auto const &c : comments) { f << "# " << c << '\n'; }
  f << trace_header << '\n';
  f << fmt::format("0,{:.17g},nan,0\n", trace.initial_objective);
  for (auto const &e : trace.entries) {
    f << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", e.iter, e.objective, e.delta, e.elapsed_ms);
  }
  if (!f) { throw Error(fmt::format("write to {} failed", path.string())); }
}

auto read_trace(std::filesystem::path const &path) -> SolverTrace
{
  std::ifstream f(path);
  if (!f) { throw Error(fmt::format("cannot open {} for reading", path.string())); }
  std::string line;
  Index lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] != '#') { break; }
  }
  if (line != trace_header) { throw Error(fmt::format("{}:{}: expected header '{}'", path.string(), lineno, trace_header)); }
  SolverTrace trace;
  bool first = true;
  Index last_iter = -1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) { continue; }
    std::istringstream row(line);
    std::string cell[4];
    for (auto &c : cell) {
      if (!std::getline(row, c, ',')) { throw Error(fmt::format("{}:{}: expected 4 columns", path.string(), lineno)); }
    }
    TraceEntry e;
    try {
      e.iter = std::stoll(cell[0]);
      e.objective = std::stod(cell[1]);
      e.delta = std::stod(cell[2]);
      e.elapsed_ms = std::stod(cell[3]);
    } catch (std::exception const &) {
      throw Error(fmt::format("{}:{}: malformed number", path.string(), lineno));
    }
    if (e.iter <= last_iter) { throw Error(fmt::format("{}:{}: iterations must increase", path.string(), lineno)); }
    last_iter = e.iter;
    if (first && e.iter == 0) {
      trace.initial_objective = e.objective;
    } else {
      trace.entries.push_back(e);
    }
    first = false;
  }
  return trace;
}

void export_frames(ImageSequence const &x, std::filesystem::path const &dir)
{
  std::filesystem::create_directories(dir);
  double peak = 0.0;
  for (Index i = 0; i < x.size(); ++i) { peak = std::max(peak, std::abs(x[i])); }
  double const scale = peak > 0.0 ? 65535.0 / peak : 0.0;
  for (Index t = 0; t < x.frames(); ++t) {
    auto const path = dir / fmt::format("frame_{:03d}.pgm", t);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) { throw Error(fmt::format("cannot open {} for writing", path.string())); }
    f << fmt::format("P5\n{} {}\n65535\n", x.nh(), x.nv());
    std::vector<char> row(size_t(x.nh()) * 2);
    for (Index v = 0; v < x.nv(); ++v) {
      for (Index h = 0; h < x.nh(); ++h) {
        auto const level = static_cast<std::uint16_t>(std::min(65535.0, std::round(std::abs(x(v, h, t)) * scale)));
        row[2 * h] = char(level >> 8);
        row[2 * h + 1] = char(level & 0xff);
      }
      f.write(row.data(), std::streamsize(row.size()));
    }
    if (!f) { throw Error(fmt::format("write to {} failed", path.string())); }
  }
}

} // namespace csmri::io
