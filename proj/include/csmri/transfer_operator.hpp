#pragma once

#include "types.hpp"

namespace csmri {

class NormalBlocks;

/*
 * Cartesian multi-coil dynamic MRI encoding: per frame t and coil c,
 *   y_{t,c} = F_h M_t F_v (s_c . x_t)
 * with unitary 1-D DFTs along v then h and the line mask M_t applied between
 * them. Output is zero-filled on the full (v, h) grid. Immutable.
 */
class TransferOperator
{
public:
  TransferOperator(CoilSensitivities sens, SamplingMask mask);

  auto dims() const -> Dims const & { return dims_; }
  auto sensitivities() const -> CoilSensitivities const & { return sens_; }
  auto mask() const -> SamplingMask const & { return mask_; }

  auto forward(ImageSequence const &x) const -> KSpaceData;
  auto adjoint(KSpaceData const &y) const -> ImageSequence;

private:
  Dims dims_;
  CoilSensitivities sens_;
  SamplingMask mask_;
};

/*
 * The normal operator H'H decouples into one n_v x n_v Hermitian block per
 * (column i, frame t):
 *   B_{i,t}[j,k] = G_t[j,k] * sum_c conj(s_{j,i,c}) s_{k,i,c},
 * where G_t = F_v' M_t F_v is circulant in (j - k).
 */
class NormalBlocks
{
public:
  NormalBlocks(Dims dims, std::vector<Cx> storage);

  auto dims() const -> Dims const & { return dims_; }
  auto block_count() const -> Index { return dims_.nh * dims_.nt; }
  // Column-major n_v x n_v block for column i, frame t.
  auto block(Index i, Index t) const -> Cx const * { return storage_.data() + (i + dims_.nh * t) * dims_.nv * dims_.nv; }

private:
  Dims dims_;
  std::vector<Cx> storage_;
};

auto build_normal_blocks(TransferOperator const &op) -> NormalBlocks;

// H'H x evaluated block by block.
auto apply_normal(NormalBlocks const &blocks, ImageSequence const &x) -> ImageSequence;

} // namespace csmri
