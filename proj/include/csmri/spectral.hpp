#pragma once

#include "transfer_operator.hpp"
#include "types.hpp"

namespace csmri {

/*
 * Eigendecomposition B_{i,t} = U diag(e) U' of every normal block. Eigenvalues
 * are ascending and clamped at zero. With the cache, (mu I + H'H)^-1 is applied
 * exactly as U diag(1 / (e + mu)) U' per column and frame.
 */
class SpectralCache
{
public:
  SpectralCache(Dims dims, std::vector<Cx> vectors, std::vector<double> values);

  auto dims() const -> Dims const & { return dims_; }
  // Column-major unitary n_v x n_v eigenvector matrix.
  auto vectors(Index i, Index t) const -> Cx const *
  {
    return vectors_.data() + (i + dims_.nh * t) * dims_.nv * dims_.nv;
  }
  auto values(Index i, Index t) const -> double const * { return values_.data() + (i + dims_.nh * t) * dims_.nv; }
  auto max_eigenvalue() const -> double;

private:
  Dims dims_;
  std::vector<Cx> vectors_;
  std::vector<double> values_;
};

auto precompute_cache(NormalBlocks const &blocks) -> SpectralCache;

// Exact solve of (mu I + H'H) z = x. Requires mu > 0.
auto apply_regularized_inverse(SpectralCache const &cache, double mu, ImageSequence const &x) -> ImageSequence;

} // namespace csmri
