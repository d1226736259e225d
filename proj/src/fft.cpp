#include "csmri/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace csmri::fft {

namespace {

// Eigen::FFT caches twiddles per length and is not safe to share across threads.
auto engine() -> Eigen::FFT<double> &
{
  thread_local Eigen::FFT<double> e = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return e;
}

template <bool Forward>
void transform(Cx *data, Index n, Index stride)
{
  if (n == 1) { return; }
  thread_local std::vector<Cx> in, out;
  in.resize(size_t(n));
  out.resize(size_t(n));
  for (Index j = 0; j < n; ++j) { in[j] = data[j * stride]; }
  if constexpr (Forward) {
    engine().fwd(out.data(), in.data(), n);
  } else {
    engine().inv(out.data(), in.data(), n);
  }
  double const scale = 1.0 / std::sqrt(double(n));
  for (Index j = 0; j < n; ++j) { data[j * stride] = out[j] * scale; }
}

} // namespace

void forward(Cx *data, Index n, Index stride)
{
  transform<true>(data, n, stride);
}

void inverse(Cx *data, Index n, Index stride)
{
  transform<false>(data, n, stride);
}

} // namespace csmri::fft
