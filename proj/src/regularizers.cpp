#include "csmri/regularizers.hpp"

#include <fmt/format.h>

#include "csmri/fft.hpp"
#include "csmri/parallel.hpp"

namespace csmri {

auto to_string(RegularizerKind k) -> std::string_view
{
  switch (k) {
  case RegularizerKind::TemporalDFT: return "tdft";
  case RegularizerKind::TemporalTV: return "ttv";
  }
  return "?";
}

auto parse_regularizer(std::string_view s) -> RegularizerKind
{
  if (s == "tdft") { return RegularizerKind::TemporalDFT; }
  if (s == "ttv") { return RegularizerKind::TemporalTV; }
  throw Error(fmt::format("unknown regularizer '{}' (expected tdft or ttv)", s));
}

auto is_tight_frame(RegularizerKind k) -> bool
{
  return k == RegularizerKind::TemporalDFT;
}

auto is_orthonormal(RegularizerKind k) -> bool
{
  return k == RegularizerKind::TemporalDFT;
}

auto temporal_diff(ImageSequence const &x) -> CoefficientField
{
  if (x.frames() < 2) { throw Error(fmt::format("temporal difference needs n_t >= 2 (got {})", x.frames())); }
  CoefficientField out(x.nv(), x.nh(), x.frames() - 1);
  for (Index t = 0; t + 1 < x.frames(); ++t) {
    auto const a = x.frame(t), b = x.frame(t + 1);
    auto dst = out.frame(t);
    for (size_t p = 0; p < dst.size(); ++p) { dst[p] = b[p] - a[p]; }
  }
  return out;
}

auto temporal_diff_adjoint(CoefficientField const &v) -> ImageSequence
{
  Index const nt = v.frames() + 1;
  ImageSequence out(v.nv(), v.nh(), nt);
  Index const np = v.nv() * v.nh();
  for (Index t = 0; t < nt; ++t) {
    auto dst = out.frame(t);
    if (t < nt - 1) {
      auto const cur = v.frame(t);
      for (Index p = 0; p < np; ++p) { dst[p] -= cur[p]; }
    }
    if (t > 0) {
      auto const prev = v.frame(t - 1);
      for (Index p = 0; p < np; ++p) { dst[p] += prev[p]; }
    }
  }
  return out;
}

auto solve_tv_normal(double c, ImageSequence const &b) -> ImageSequence
{
  if (!(c > 0.0)) { throw Error(fmt::format("TV normal solve needs c > 0 (got {})", c)); }
  Index const nt = b.frames();
  Index const np = b.nv() * b.nh();
  ImageSequence z(b.dims());
  if (nt == 1) {
    for (Index p = 0; p < np; ++p) { z[p] = b[p] / c; }
    return z;
  }

  // Thomas elimination; the matrix is shared by every pixel so the forward
  // sweep factors are computed once.
  std::vector<double> diag(static_cast<size_t>(nt)), upper(static_cast<size_t>(nt)), inv_pivot(static_cast<size_t>(nt));
  for (Index t = 0; t < nt; ++t) { diag[t] = c + ((t == 0 || t == nt - 1) ? 1.0 : 2.0); }
  double pivot = diag[0];
  inv_pivot[0] = 1.0 / pivot;
  upper[0] = -1.0 * inv_pivot[0];
  for (Index t = 1; t < nt; ++t) {
    pivot = diag[t] + upper[t - 1];
    inv_pivot[t] = 1.0 / pivot;
    upper[t] = -1.0 * inv_pivot[t];
  }

  parallel::for_each(b.nh(), [&](Index h) {
    for (Index v = 0; v < b.nv(); ++v) {
      Index const p = v + b.nv() * h;
      // forward sweep: sub-diagonal is -1
      z[p] = b[p] * inv_pivot[0];
      for (Index t = 1; t < nt; ++t) { z[p + np * t] = (b[p + np * t] + z[p + np * (t - 1)]) * inv_pivot[t]; }
      for (Index t = nt - 2; t >= 0; --t) { z[p + np * t] -= upper[t] * z[p + np * (t + 1)]; }
    }
  });
  return z;
}

namespace {

template <bool Forward, typename Out, typename In>
auto dft_along_time(In const &in) -> Out
{
  Out out(in.nv(), in.nh(), in.frames());
  Index const np = in.nv() * in.nh();
  std::copy(in.data(), in.data() + in.size(), out.data());
  parallel::for_each(in.nh(), [&](Index h) {
    for (Index v = 0; v < in.nv(); ++v) {
      Cx *series = out.data() + v + in.nv() * h;
      if constexpr (Forward) {
        fft::forward(series, in.frames(), np);
      } else {
        fft::inverse(series, in.frames(), np);
      }
    }
  });
  return out;
}

} // namespace

auto temporal_dft_forward(ImageSequence const &x) -> CoefficientField
{
  return dft_along_time<true, CoefficientField>(x);
}

auto temporal_dft_adjoint(CoefficientField const &w) -> ImageSequence
{
  return dft_along_time<false, ImageSequence>(w);
}

auto apply_regularizer(RegularizerKind k, ImageSequence const &x) -> CoefficientField
{
  return k == RegularizerKind::TemporalDFT ? temporal_dft_forward(x) : temporal_diff(x);
}

auto apply_regularizer_adjoint(RegularizerKind k, CoefficientField const &w) -> ImageSequence
{
  return k == RegularizerKind::TemporalDFT ? temporal_dft_adjoint(w) : temporal_diff_adjoint(w);
}

auto solve_regularizer_normal(RegularizerKind k, double c, ImageSequence const &b) -> ImageSequence
{
  if (k == RegularizerKind::TemporalTV) { return solve_tv_normal(c, b); }
  if (!(c > 0.0)) { throw Error(fmt::format("regularizer normal solve needs c > 0 (got {})", c)); }
  return (1.0 / (c + 1.0)) * b;
}

auto frame_complement(RegularizerKind k, CoefficientField const &a) -> CoefficientField
{
  if (!is_tight_frame(k)) { throw Error(fmt::format("{} is not a tight frame", to_string(k))); }
  return a - apply_regularizer(k, apply_regularizer_adjoint(k, a));
}

} // namespace csmri
