#pragma once

#include <string_view>

#include "types.hpp"

namespace csmri {

enum class RegularizerKind
{
  TemporalDFT, // orthonormal DFT along t; a tight frame
  TemporalTV,  // first differences along t, n_t - 1 output frames
};

auto to_string(RegularizerKind k) -> std::string_view;
auto parse_regularizer(std::string_view s) -> RegularizerKind;
// Psi'Psi = I holds.
auto is_tight_frame(RegularizerKind k) -> bool;
// Psi Psi' = I holds too, so (I - Psi Psi') vanishes.
auto is_orthonormal(RegularizerKind k) -> bool;

// 0 if |a| <= tau, else (|a| - tau) a / |a|.
inline auto soft_threshold(Cx a, double tau) -> Cx
{
  double const mag = std::abs(a);
  if (mag <= tau) { return Cx{}; }
  return a * ((mag - tau) / mag);
}

template <typename Tag>
auto soft_threshold(Field<Tag> const &a, double tau) -> Field<Tag>
{
  if (tau < 0.0) { throw Error("soft threshold needs tau >= 0"); }
  Field<Tag> out = a;
  for (Index i = 0; i < out.size(); ++i) { out[i] = soft_threshold(a[i], tau); }
  return out;
}

// Frame t of the output is x_{t+1} - x_t. Needs n_t >= 2.
auto temporal_diff(ImageSequence const &x) -> CoefficientField;
auto temporal_diff_adjoint(CoefficientField const &v) -> ImageSequence;

/*
 * Solves (c I + D'D) z = b along t for every pixel. D'D is tridiagonal with
 * diagonal [1, 2, ..., 2, 1] and off-diagonals -1. Requires c > 0.
 */
auto solve_tv_normal(double c, ImageSequence const &b) -> ImageSequence;

// Unitary DFT along t for every pixel, and its inverse.
auto temporal_dft_forward(ImageSequence const &x) -> CoefficientField;
auto temporal_dft_adjoint(CoefficientField const &w) -> ImageSequence;

// Kind-dispatched forms used by the solvers.
auto apply_regularizer(RegularizerKind k, ImageSequence const &x) -> CoefficientField;
auto apply_regularizer_adjoint(RegularizerKind k, CoefficientField const &w) -> ImageSequence;
// (c I + R'R)^-1 b
auto solve_regularizer_normal(RegularizerKind k, double c, ImageSequence const &b) -> ImageSequence;
// (I - Psi Psi') a, evaluated literally.
auto frame_complement(RegularizerKind k, CoefficientField const &a) -> CoefficientField;

} // namespace csmri
