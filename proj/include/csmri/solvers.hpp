#pragma once

#include <functional>
#include <string_view>

#include "regularizers.hpp"
#include "spectral.hpp"
#include "transfer_operator.hpp"
#include "types.hpp"

namespace csmri {

struct SolverConfig
{
  double lambda = 0.002;
  double mu = 0.06;       // synthesis mu, analysis mu_2, P1 mu
  double mu_ratio = 0.5;  // analysis mu_2 / mu_1
  int cg_iters = 10;      // P1 inner CG steps
  int max_iters = 200;
  double tol = 0.001;     // stop once delta < tol
  int log_every = 1;      // evaluate the objective every n-th iteration

  void validate() const;
};

struct TraceEntry
{
  Index iter = 0;
  double objective = 0.0;
  double delta = 0.0;
  double elapsed_ms = 0.0;
};

/*
 * One entry per logged iteration. `initial_objective` is J at the starting
 * point. Delta of entry j compares it against entry j - 1 (or the initial
 * objective). Elapsed time excludes objective evaluation.
 */
struct SolverTrace
{
  double initial_objective = 0.0;
  std::vector<TraceEntry> entries;

  // j = 0 is the initial objective, j >= 1 the j-th entry.
  auto objective_at(Index j) const -> double { return j == 0 ? initial_objective : entries.at(size_t(j - 1)).objective; }
};

struct SolveResult
{
  ImageSequence x;
  SolverTrace trace;
  bool converged = false;
  Index iterations = 0;
};

enum class Algorithm
{
  AdmmSynthesis,
  AdmmAnalysis,
  Fista,
  P1,
};

auto to_string(Algorithm a) -> std::string_view;
auto parse_algorithm(std::string_view s) -> Algorithm;
// Algorithm 1 and FISTA need a tight frame; the others accept any regularizer.
auto compatible(Algorithm a, RegularizerKind k) -> bool;

/*
 * Coefficient step of the synthesis ADMM:
 *   argmin_w ||y - H Psi' w||^2 + mu ||w - target||^2
 *     = (1/mu)(I - Psi Psi')[Psi H'y + mu target] + Psi (mu I + H'H)^-1 [H'y + mu Psi' target]
 * With `literal_complement` false the first term is skipped for orthonormal Psi.
 */
auto synthesis_coefficient_update(SpectralCache const &cache,
                                  RegularizerKind psi,
                                  double mu,
                                  ImageSequence const &adjoint_data,
                                  CoefficientField const &target,
                                  bool literal_complement = false) -> CoefficientField;

auto admm_synthesis(KSpaceData const &y,
                    TransferOperator const &op,
                    SpectralCache const &cache,
                    RegularizerKind psi,
                    SolverConfig const &cfg) -> SolveResult;

auto admm_analysis(KSpaceData const &y,
                   TransferOperator const &op,
                   SpectralCache const &cache,
                   RegularizerKind r,
                   SolverConfig const &cfg) -> SolveResult;

// Step 1/L uses L = 2 * largest normal-block eigenvalue.
auto fista(KSpaceData const &y,
           TransferOperator const &op,
           NormalBlocks const &blocks,
           double max_eigenvalue,
           RegularizerKind psi,
           SolverConfig const &cfg) -> SolveResult;

auto p1_split_bregman(KSpaceData const &y,
                      TransferOperator const &op,
                      NormalBlocks const &blocks,
                      RegularizerKind r,
                      SolverConfig const &cfg) -> SolveResult;

using LinearOperator = std::function<ImageSequence(ImageSequence const &)>;

// Exactly `iters` CG steps from x0; returns early only on breakdown.
auto conjugate_gradient(LinearOperator const &apply_a, ImageSequence const &b, ImageSequence x0, int iters)
  -> ImageSequence;

// Normal blocks plus their eigendecomposition, with the build time.
struct Precomputed
{
  NormalBlocks blocks;
  SpectralCache cache;
  double build_ms = 0.0;
};

auto precompute(TransferOperator const &op) -> Precomputed;

auto solve(Algorithm a,
           KSpaceData const &y,
           TransferOperator const &op,
           Precomputed const &pre,
           RegularizerKind r,
           SolverConfig const &cfg) -> SolveResult;

} // namespace csmri
