#include "csmri/transfer_operator.hpp"

#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "csmri/fft.hpp"
#include "csmri/parallel.hpp"

namespace csmri {

namespace {

void check_kspace_dims(Dims const &expected, Dims const &actual)
{
  check_image_dims(expected, actual, "k-space");
  if (expected.nc != actual.nc) {
    throw Error(fmt::format("k-space: dimension mismatch on axis nc (expected {}, got {})", expected.nc, actual.nc));
  }
}

} // namespace

TransferOperator::TransferOperator(CoilSensitivities sens, SamplingMask mask)
  : sens_{std::move(sens)}
  , mask_{std::move(mask)}
{
  dims_ = Dims{sens_.nv(), sens_.nh(), mask_.nt(), sens_.coils()};
  dims_.validate();
  if (mask_.nv() != sens_.nv()) {
    throw Error(fmt::format("mask has {} lines but sensitivities have nv={}", mask_.nv(), sens_.nv()));
  }
  sens_.validate();
  mask_.validate();
}

auto TransferOperator::forward(ImageSequence const &x) const -> KSpaceData
{
  check_image_dims(dims_, x.dims(), "forward operator input");
  KSpaceData y(dims_, mask_);
  Index const nv = dims_.nv, nh = dims_.nh, nc = dims_.nc;
  parallel::for_each(nc * dims_.nt, [&](Index tc) {
    Index const c = tc % nc, t = tc / nc;
    auto out = y.slice(c, t);
    auto in = x.frame(t);
    auto s = sens_.coil(c);
    for (Index p = 0; p < nv * nh; ++p) { out[p] = s[p] * in[p]; }
    for (Index h = 0; h < nh; ++h) { fft::forward(out.data() + h * nv, nv); }
    for (Index v = 0; v < nv; ++v) {
      if (mask_.kept(v, t)) {
        fft::forward(out.data() + v, nh, nv);
      } else {
        for (Index h = 0; h < nh; ++h) { out[v + h * nv] = Cx{}; }
      }
    }
  });
  return y;
}

auto TransferOperator::adjoint(KSpaceData const &y) const -> ImageSequence
{
  check_kspace_dims(dims_, y.dims());
  Index const nv = dims_.nv, nh = dims_.nh, nc = dims_.nc, nt = dims_.nt;
  // Per-(c, t) coil images, then a fixed-order coil sum.
  std::vector<Cx> coil_images(static_cast<size_t>(nv * nh * nc * nt));
  parallel::for_each(nc * nt, [&](Index tc) {
    Index const c = tc % nc, t = tc / nc;
    Cx *img = coil_images.data() + nv * nh * tc;
    auto in = y.slice(c, t);
    for (Index v = 0; v < nv; ++v) {
      if (mask_.kept(v, t)) {
        for (Index h = 0; h < nh; ++h) { img[v + h * nv] = in[v + h * nv]; }
        fft::inverse(img + v, nh, nv);
      } else {
        for (Index h = 0; h < nh; ++h) { img[v + h * nv] = Cx{}; }
      }
    }
    for (Index h = 0; h < nh; ++h) { fft::inverse(img + h * nv, nv); }
    auto s = sens_.coil(c);
    for (Index p = 0; p < nv * nh; ++p) { img[p] *= std::conj(s[p]); }
  });
  ImageSequence x(dims_);
  parallel::for_each(nt, [&](Index t) {
    auto out = x.frame(t);
    for (Index c = 0; c < nc; ++c) {
      Cx const *img = coil_images.data() + nv * nh * (c + nc * t);
      for (Index p = 0; p < nv * nh; ++p) { out[p] += img[p]; }
    }
  });
  return x;
}

NormalBlocks::NormalBlocks(Dims dims, std::vector<Cx> storage)
  : dims_{dims}
  , storage_{std::move(storage)}
{
  if (Index(storage_.size()) != dims_.nv * dims_.nv * dims_.nh * dims_.nt) {
    throw Error("normal block storage does not match dims");
  }
}

auto build_normal_blocks(TransferOperator const &op) -> NormalBlocks
{
  Dims const d = op.dims();
  Index const nv = d.nv;
  auto const &mask = op.mask();
  auto const &sens = op.sensitivities();

  // G_t[j,k] = g_t((j - k) mod nv), g_t(m) = (1/nv) sum_{f kept} exp(2 pi i f m / nv)
  std::vector<Cx> kernel(static_cast<size_t>(nv * d.nt));
  for (Index t = 0; t < d.nt; ++t) {
    for (Index m = 0; m < nv; ++m) {
      Cx acc{};
      for (Index f = 0; f < nv; ++f) {
        if (!mask.kept(f, t)) { continue; }
        double const phase = 2.0 * std::numbers::pi * double((f * m) % nv) / double(nv);
        acc += std::polar(1.0, phase);
      }
      kernel[m + nv * t] = acc / double(nv);
    }
  }

  std::vector<Cx> storage(static_cast<size_t>(nv * nv * d.nh * d.nt));
  parallel::for_each(d.nh * d.nt, [&](Index b) {
    Index const i = b % d.nh, t = b / d.nh;
    Eigen::Map<Eigen::MatrixXcd> B(storage.data() + b * nv * nv, nv, nv);
    for (Index k = 0; k < nv; ++k) {
      for (Index j = 0; j < nv; ++j) {
        Cx coil{};
        for (Index c = 0; c < d.nc; ++c) { coil += std::conj(sens(j, i, c)) * sens(k, i, c); }
        B(j, k) = kernel[((j - k + nv) % nv) + nv * t] * coil;
      }
    }
    Eigen::MatrixXcd const sym = 0.5 * (B + B.adjoint());
    B = sym;
  });
  return NormalBlocks(d, std::move(storage));
}

auto apply_normal(NormalBlocks const &blocks, ImageSequence const &x) -> ImageSequence
{
  Dims const &d = blocks.dims();
  check_image_dims(d, x.dims(), "normal operator input");
  ImageSequence out(d);
  Index const nv = d.nv;
  parallel::for_each(d.nh * d.nt, [&](Index b) {
    Index const i = b % d.nh, t = b / d.nh;
    Eigen::Map<Eigen::MatrixXcd const> B(blocks.block(i, t), nv, nv);
    Eigen::Map<Eigen::VectorXcd const> in(x.column(i, t).data(), nv);
    Eigen::Map<Eigen::VectorXcd> dst(out.column(i, t).data(), nv);
    dst.noalias() = B * in;
  });
  return out;
}

} // namespace csmri
