#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csmri/cli.hpp"
#include "csmri/io.hpp"
#include "csmri/metrics.hpp"
#include "oracles.hpp"

using namespace csmri;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per test case
struct Scratch
{
  fs::path dir;
  explicit Scratch(std::string const &name)
    : dir{fs::temp_directory_path() / ("csmri_" + name)}
  {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  auto operator/(std::string const &f) const -> std::string { return (dir / f).string(); }
};

auto slurp(fs::path const &p) -> std::string
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(fs::path const &p, std::string const &bytes)
{
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

// values exactly representable in float32
auto float_image(Dims const &d, std::mt19937_64 &rng) -> ImageSequence
{
  auto x = oracle::random_image(d, rng);
  for (Index i = 0; i < x.size(); ++i) { x[i] = {float(x[i].real()), float(x[i].imag())}; }
  return x;
}

auto read_pgm(fs::path const &p, Index &w, Index &h) -> std::vector<int>
{
  std::ifstream in(p, std::ios::binary);
  std::string magic;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  CHECK(magic == "P5");
  CHECK(maxval == 65535);
  std::vector<int> px(size_t(w * h));
  for (auto &v : px) {
    int const hi = in.get(), lo = in.get();
    v = (hi << 8) | lo;
  }
  return px;
}

auto pipeline(Scratch const &s) -> void
{
  REQUIRE(run_cli({"phantom", "--nv", "16", "--nh", "12", "--nt", "4", "--nc", "2", "--out-image", s / "x.csk",
                   "--out-sens", s / "s.csk"}) == 0);
  REQUIRE(run_cli({"mask", "--nv", "16", "--nt", "4", "--accel", "2", "--center", "2", "--out", s / "m.csk"}) == 0);
  REQUIRE(run_cli({"acquire", "--image", s / "x.csk", "--sens", s / "s.csk", "--mask", s / "m.csk", "--out",
                   s / "y.csk"}) == 0);
}

} // namespace

TEST_CASE("datasets round trip")
{
  Scratch const s("roundtrip");
  std::mt19937_64 rng(1);
  Dims const d{5, 4, 3, 2};
  auto const x = float_image(d, rng);
  io::write_dataset(s / "x.csk", x);
  CHECK(io::read_image(s / "x.csk") == x);

  CoilSensitivities sens(d.nv, d.nh, d.nc);
  for (Index i = 0; i < sens.size(); ++i) { sens.data()[i] = {0.25 * double(i), -1.5}; }
  io::write_dataset(s / "s.csk", sens);
  CHECK(io::read_sensitivities(s / "s.csk") == sens);

  auto const m = oracle::random_mask(d.nv, d.nt, rng);
  io::write_dataset(s / "m.csk", m);
  CHECK(io::read_mask(s / "m.csk") == m);

  KSpaceData y(d, m);
  for (Index t = 0; t < d.nt; ++t) {
    for (Index c = 0; c < d.nc; ++c) {
      for (Index h = 0; h < d.nh; ++h) {
        for (Index v = 0; v < d.nv; ++v) {
          float const re = float(0.1 * double(v + h)), im = float(-0.3 * double(c + t));
          if (m.kept(v, t)) { y(v, h, c, t) = Cx{double(re), double(im)}; }
        }
      }
    }
  }
  io::write_dataset(s / "y.csk", y);
  auto const ry = io::read_kspace(s / "y.csk");
  CHECK(ry.dims() == y.dims());
  CHECK(ry.mask() == y.mask());
  for (Index i = 0; i < y.size(); ++i) { CHECK(ry[i] == y[i]); }
  CHECK(std::holds_alternative<KSpaceData>(io::read_dataset(s / "y.csk")));

  // writing the re-read file reproduces the bytes
  io::write_dataset(s / "y2.csk", io::read_kspace(s / "y.csk"));
  CHECK(slurp(s / "y.csk") == slurp(s / "y2.csk"));
}

TEST_CASE("malformed datasets")
{
  Scratch const s("malformed");
  ImageSequence x(4, 4, 2);
  x(1, 1, 1) = 1.0;
  io::write_dataset(s / "x.csk", x);
  auto bytes = slurp(s / "x.csk");

  auto bad = bytes;
  bad.replace(0, 4, "CSK2");
  spit(s / "bad.csk", bad);
  CHECK_THROWS_WITH_AS(io::read_image(s / "bad.csk"), doctest::Contains("byte offset 0"), Error);

  spit(s / "short.csk", bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_WITH_AS(io::read_image(s / "short.csk"), doctest::Contains("truncated"), Error);

  spit(s / "tiny.csk", bytes.substr(0, 10));
  CHECK_THROWS_AS(io::read_image(s / "tiny.csk"), Error);

  CHECK_THROWS_AS(io::read_mask(s / "x.csk"), Error);
  CHECK_THROWS_AS(io::read_image(s / "missing.csk"), Error);

  // k-space with energy on an unsampled row
  SamplingMask m(4, 2, true);
  m.set(2, 1, false);
  KSpaceData y(Dims{4, 3, 2, 1}, m);
  io::write_dataset(s / "y.csk", y);
  auto ky = slurp(s / "y.csk");
  // sample (v=2, h=0, c=0, t=1): index 2 + 4*3*1*1 = 14, 8 bytes each
  std::size_t const at = io::header_bytes + 14 * 8;
  float const one = 1.0f;
  ky.replace(at, 4, reinterpret_cast<char const *>(&one), 4);
  spit(s / "ybad.csk", ky);
  CHECK_THROWS_WITH_AS(io::read_kspace(s / "ybad.csk"), doctest::Contains("(v=2, t=1)"), Error);
}

TEST_CASE("frame export")
{
  Scratch const s("frames");
  SUBCASE("global scaling")
  {
    ImageSequence x(3, 2, 2);
    x(0, 0, 0) = 2.0;
    x(1, 1, 1) = Cx{0.0, 1.0};
    io::export_frames(x, s.dir / "f");
    Index w = 0, h = 0;
    auto const f0 = read_pgm(s.dir / "f" / "frame_000.pgm", w, h);
    CHECK(w == 2);
    CHECK(h == 3);
    CHECK(f0[0] == 65535);
    auto const f1 = read_pgm(s.dir / "f" / "frame_001.pgm", w, h);
    // row v = 1, column h = 1
    CHECK(std::abs(f1[1 * 2 + 1] - 32768) <= 1);
    CHECK(f1[0] == 0);
  }
  SUBCASE("constant and zero images")
  {
    ImageSequence c(2, 2, 1);
    for (Index i = 0; i < c.size(); ++i) { c[i] = 0.3; }
    io::export_frames(c, s.dir / "c");
    Index w = 0, h = 0;
    for (int v : read_pgm(s.dir / "c" / "frame_000.pgm", w, h)) { CHECK(v == 65535); }
    io::export_frames(ImageSequence(2, 2, 1), s.dir / "z");
    for (int v : read_pgm(s.dir / "z" / "frame_000.pgm", w, h)) { CHECK(v == 0); }
  }
}

TEST_CASE("trace files")
{
  Scratch const s("trace");
  SolverTrace tr;
  tr.initial_objective = 10.0;
  tr.entries = {{1, 8.0, 0.25, 1.5}, {2, 7.9, 0.1 / 7.9, 3.25}};
  io::write_trace(s / "t.csv", tr, {"algorithm=test"});
  std::ifstream in(s / "t.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "# algorithm=test");
  std::getline(in, line);
  CHECK(line == io::trace_header);
  CHECK(line == "iter,objective,delta,elapsed_ms");
  std::getline(in, line);
  CHECK(line.rfind("0,10,nan,0", 0) == 0);

  auto const back = io::read_trace(s / "t.csv");
  CHECK(back.initial_objective == 10.0);
  REQUIRE(back.entries.size() == 2);
  for (Index k = 1; k <= 2; ++k) {
    double const replay = (back.objective_at(k - 1) - back.objective_at(k)) / back.objective_at(k);
    CHECK(std::abs(replay - back.entries[size_t(k - 1)].delta) <= 1e-12);
  }
}

TEST_CASE("cli pipeline")
{
  Scratch const s("cli");
  pipeline(s);
  REQUIRE(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r.csk", "--trace",
                   s / "t.csv", "--frames", s / "frames"}) == 0);
  auto const text = slurp(s / "t.csv");
  CHECK(text.find("lambda=0.002") != std::string::npos);
  CHECK(text.find("mu=0.06") != std::string::npos);
  CHECK(text.find("iter,objective,delta,elapsed_ms\n0,") != std::string::npos);
  auto const tr = io::read_trace(s / "t.csv");
  CHECK(!tr.entries.empty());
  for (size_t k = 1; k <= tr.entries.size(); ++k) {
    double const replay = (tr.objective_at(Index(k) - 1) - tr.objective_at(Index(k))) / tr.objective_at(Index(k));
    CHECK(std::abs(replay - tr.entries[k - 1].delta) <= 1e-12 * std::max(1.0, std::abs(replay)));
  }
  CHECK(fs::exists(s.dir / "frames" / "frame_003.pgm"));
  auto const r = io::read_image(s / "r.csk");
  CHECK(run_cli({"metrics", "--recon", s / "r.csk", "--reference", s / "x.csk"}) == 0);
  CHECK(nrmse(r, io::read_image(s / "x.csk")) < 1.0);

  SUBCASE("analysis with TV")
  {
    CHECK(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "ra.csk", "--algorithm",
                   "admm-analysis", "--max-iters", "5"}) == 0);
    CHECK(slurp(s / "ra.csk").size() > io::header_bytes);
  }
}

TEST_CASE("cli usage errors")
{
  Scratch const s("usage");
  pipeline(s);
  CHECK(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r.csk", "--algorithm",
                 "admm-synthesis", "--regularizer", "ttv"}) == 2);
  CHECK(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r.csk", "--algorithm",
                 "fista", "--regularizer", "ttv"}) == 2);
  CHECK(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r.csk", "--mu", "0"}) == 2);
  CHECK(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r.csk", "--algorithm",
                 "sgd"}) == 2);
  CHECK(run_cli({"recon", "--kspace", s / "missing.csk", "--sens", s / "s.csk", "--out", s / "r.csk"}) != 0);
  CHECK(run_cli({"frobnicate"}) == 2);

  // sensitivities from a different grid
  REQUIRE(run_cli({"phantom", "--nv", "16", "--nh", "10", "--nt", "4", "--nc", "2", "--out-image", s / "x2.csk",
                   "--out-sens", s / "s2.csk"}) == 0);
  CHECK(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s2.csk", "--out", s / "r.csk"}) == 1);
}

TEST_CASE("cli config file and precedence")
{
  Scratch const s("config");
  pipeline(s);
  spit(s.dir / "c.toml", "[recon]\nlambda = 0.5\nmax-iters = 3\n");
  REQUIRE(run_cli({"--config", s / "c.toml", "recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out",
                   s / "r.csk", "--trace", s / "t.csv"}) == 0);
  auto text = slurp(s / "t.csv");
  CHECK(text.find("lambda=0.5 ") != std::string::npos);
  CHECK(text.find("max_iters=3 ") != std::string::npos);

  REQUIRE(run_cli({"--config", s / "c.toml", "recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out",
                   s / "r.csk", "--trace", s / "t.csv", "--lambda", "0.1"}) == 0);
  text = slurp(s / "t.csv");
  CHECK(text.find("lambda=0.1 ") != std::string::npos);
  CHECK(text.find("max_iters=3 ") != std::string::npos);
}

TEST_CASE("cli output does not depend on the thread count")
{
  Scratch const s("threads");
  pipeline(s);
  for (auto algo : {"admm-synthesis", "admm-analysis", "fista", "p1"}) {
    CAPTURE(algo);
    REQUIRE(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r1.csk", "--algorithm",
                     algo, "--max-iters", "20", "--threads", "1"}) == 0);
    REQUIRE(run_cli({"recon", "--kspace", s / "y.csk", "--sens", s / "s.csk", "--out", s / "r8.csk", "--algorithm",
                     algo, "--max-iters", "20", "--threads", "8"}) == 0);
    CHECK(slurp(s / "r1.csk") == slurp(s / "r8.csk"));
  }
}
