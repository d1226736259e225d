#include "csmri/metrics.hpp"

#include <fmt/format.h>

namespace csmri {

auto data_misfit(KSpaceData const &y, TransferOperator const &op, ImageSequence const &x) -> double
{
  KSpaceData const hx = op.forward(x);
  Dims const &d = op.dims();
  if (y.dims() != d) { throw Error(fmt::format("data misfit: k-space dims {} do not match operator {}", to_string(y.dims()), to_string(d))); }
  double acc = 0.0;
  for (Index t = 0; t < d.nt; ++t) {
    for (Index c = 0; c < d.nc; ++c) {
      for (Index h = 0; h < d.nh; ++h) {
        for (Index v = 0; v < d.nv; ++v) {
          if (op.mask().kept(v, t)) { acc += std::norm(y(v, h, c, t) - hx(v, h, c, t)); }
        }
      }
    }
  }
  return acc;
}

auto objective_synthesis(KSpaceData const &y,
                         TransferOperator const &op,
                         RegularizerKind psi,
                         CoefficientField const &w,
                         double lambda) -> double
{
  return lambda * norm1(w) + data_misfit(y, op, apply_regularizer_adjoint(psi, w));
}

auto objective_analysis(KSpaceData const &y,
                        TransferOperator const &op,
                        RegularizerKind r,
                        ImageSequence const &x,
                        double lambda) -> double
{
  double const penalty = lambda == 0.0 ? 0.0 : lambda * norm1(apply_regularizer(r, x));
  return penalty + data_misfit(y, op, x);
}

auto delta_ratio(double previous, double current) -> double
{
  if (current == 0.0) { throw Error("delta ratio undefined: objective is exactly zero"); }
  return (previous - current) / current;
}

auto delta_ratio(SolverTrace const &trace, Index k) -> double
{
  if (k < 1 || k > Index(trace.entries.size())) {
    throw Error(fmt::format("delta ratio index {} outside [1, {}]", k, trace.entries.size()));
  }
  return delta_ratio(trace.objective_at(k - 1), trace.objective_at(k));
}

auto nrmse(ImageSequence const &x, ImageSequence const &ref) -> double
{
  check_image_dims(ref.dims(), x.dims(), "nrmse");
  double const denom = norm2(ref);
  if (denom == 0.0) { throw Error("nrmse undefined for an all-zero reference"); }
  return norm2(x - ref) / denom;
}

} // namespace csmri
