#include "csmri/spectral.hpp"

#include <algorithm>
#include <atomic>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "csmri/parallel.hpp"

namespace csmri {

SpectralCache::SpectralCache(Dims dims, std::vector<Cx> vectors, std::vector<double> values)
  : dims_{dims}
  , vectors_{std::move(vectors)}
  , values_{std::move(values)}
{
  Index const blocks = dims_.nh * dims_.nt;
  if (Index(vectors_.size()) != blocks * dims_.nv * dims_.nv || Index(values_.size()) != blocks * dims_.nv) {
    throw Error("spectral cache storage does not match dims");
  }
}

auto SpectralCache::max_eigenvalue() const -> double
{
  double m = 0.0;
  for (double e : values_) { m = std::max(m, e); }
  return m;
}

auto precompute_cache(NormalBlocks const &blocks) -> SpectralCache
{
  Dims const d = blocks.dims();
  Index const nv = d.nv;
  std::vector<Cx> vectors(static_cast<size_t>(nv * nv * d.nh * d.nt));
  std::vector<double> values(static_cast<size_t>(nv * d.nh * d.nt));
  // Lowest failing block index, so the reported block does not depend on scheduling.
  std::atomic<Index> failed{-1};

  parallel::for_each(d.nh * d.nt, [&](Index b) {
    Index const i = b % d.nh, t = b / d.nh;
    Eigen::Map<Eigen::MatrixXcd const> B(blocks.block(i, t), nv, nv);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(B);
    if (solver.info() != Eigen::Success) {
      Index expected = failed.load();
      while ((expected < 0 || b < expected) && !failed.compare_exchange_weak(expected, b)) {}
      return;
    }
    Eigen::Map<Eigen::MatrixXcd>(vectors.data() + b * nv * nv, nv, nv) = solver.eigenvectors();
    for (Index k = 0; k < nv; ++k) { values[b * nv + k] = std::max(solver.eigenvalues()[k], 0.0); }
  });

  if (Index const b = failed.load(); b >= 0) {
    throw Error(fmt::format("eigendecomposition failed for normal block (i={}, t={})", b % d.nh, b / d.nh));
  }
  return SpectralCache(d, std::move(vectors), std::move(values));
}

auto apply_regularized_inverse(SpectralCache const &cache, double mu, ImageSequence const &x) -> ImageSequence
{
  if (!(mu > 0.0)) { throw Error(fmt::format("regularized inverse needs mu > 0 (got {})", mu)); }
  Dims const &d = cache.dims();
  check_image_dims(d, x.dims(), "regularized inverse input");
  Index const nv = d.nv;
  ImageSequence out(d);
  parallel::for_each(d.nh * d.nt, [&](Index b) {
    Index const i = b % d.nh, t = b / d.nh;
    Eigen::Map<Eigen::MatrixXcd const> U(cache.vectors(i, t), nv, nv);
    Eigen::Map<Eigen::VectorXd const> e(cache.values(i, t), nv);
    Eigen::Map<Eigen::VectorXcd const> in(x.column(i, t).data(), nv);
    Eigen::Map<Eigen::VectorXcd> dst(out.column(i, t).data(), nv);
    Eigen::VectorXcd coeff = U.adjoint() * in;
    coeff.array() /= (e.array() + mu).cast<Cx>();
    dst.noalias() = U * coeff;
  });
  return out;
}

} // namespace csmri
