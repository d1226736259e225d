#pragma once

#include "regularizers.hpp"
#include "solvers.hpp"
#include "transfer_operator.hpp"
#include "types.hpp"

namespace csmri {

// ||y - H x||^2 summed over sampled rows only.
auto data_misfit(KSpaceData const &y, TransferOperator const &op, ImageSequence const &x) -> double;

// lambda ||w||_1 + ||y - H Psi' w||^2
auto objective_synthesis(KSpaceData const &y,
                         TransferOperator const &op,
                         RegularizerKind psi,
                         CoefficientField const &w,
                         double lambda) -> double;

// lambda ||R x||_1 + ||y - H x||^2
auto objective_analysis(KSpaceData const &y,
                        TransferOperator const &op,
                        RegularizerKind r,
                        ImageSequence const &x,
                        double lambda) -> double;

// (J(k-1) - J(k)) / J(k). Throws when J(k) = 0.
auto delta_ratio(double previous, double current) -> double;
auto delta_ratio(SolverTrace const &trace, Index k) -> double;

// ||x - ref|| / ||ref||
auto nrmse(ImageSequence const &x, ImageSequence const &ref) -> double;

} // namespace csmri
