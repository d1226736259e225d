#include "csmri/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "csmri/metrics.hpp"

namespace csmri {

void SolverConfig::validate() const
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) { throw Error(fmt::format("lambda must be >= 0 (got {})", lambda)); }
  if (!(mu > 0.0) || !std::isfinite(mu)) { throw Error(fmt::format("mu must be > 0 (got {})", mu)); }
  if (!(mu_ratio > 0.0) || !std::isfinite(mu_ratio)) { throw Error(fmt::format("mu ratio must be > 0 (got {})", mu_ratio)); }
  if (cg_iters < 1) { throw Error(fmt::format("cg iterations must be >= 1 (got {})", cg_iters)); }
  if (max_iters < 1) { throw Error(fmt::format("max iterations must be >= 1 (got {})", max_iters)); }
  if (!(tol >= 0.0)) { throw Error(fmt::format("tolerance must be >= 0 (got {})", tol)); }
  if (log_every < 1) { throw Error(fmt::format("log interval must be >= 1 (got {})", log_every)); }
}

auto to_string(Algorithm a) -> std::string_view
{
  switch (a) {
  case Algorithm::AdmmSynthesis: return "admm-synthesis";
  case Algorithm::AdmmAnalysis: return "admm-analysis";
  case Algorithm::Fista: return "fista";
  case Algorithm::P1: return "p1";
  }
  return "?";
}

auto parse_algorithm(std::string_view s) -> Algorithm
{
  for (auto a : {Algorithm::AdmmSynthesis, Algorithm::AdmmAnalysis, Algorithm::Fista, Algorithm::P1}) {
    if (s == to_string(a)) { return a; }
  }
  throw Error(fmt::format("unknown algorithm '{}'", s));
}

auto compatible(Algorithm a, RegularizerKind k) -> bool
{
  if (a == Algorithm::AdmmSynthesis || a == Algorithm::Fista) { return is_tight_frame(k); }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

auto ms_between(Clock::time_point a, Clock::time_point b) -> double
{
  return std::chrono::duration<double, std::milli>(b - a).count();
}

// Delta with the J = 0 cases resolved: 0/0 counts as converged, x/0 as no progress bound.
auto guarded_delta(double previous, double current) -> double
{
  if (current == 0.0) { return previous == 0.0 ? 0.0 : std::numeric_limits<double>::infinity(); }
  return delta_ratio(previous, current);
}

/*
 * Owns the solve clock and the trace. Objective evaluation time is measured
 * and subtracted from elapsed time.
 */
class Recorder
{
public:
  Recorder(SolverConfig const &cfg, std::function<double()> const &objective)
    : cfg_{cfg}
  {
    trace_.initial_objective = objective();
    previous_ = trace_.initial_objective;
    start_ = Clock::now();
  }

  auto due(Index k) const -> bool { return k % cfg_.log_every == 0 || k == cfg_.max_iters; }

  // Returns true once 0 <= delta < tol.
  auto log(Index k, std::function<double()> const &objective) -> bool
  {
    auto const t0 = Clock::now();
    double const J = objective();
    auto const t1 = Clock::now();
    double const elapsed = ms_between(start_, t0) - excluded_ms_;
    excluded_ms_ += ms_between(t0, t1);
    double const delta = guarded_delta(previous_, J);
    trace_.entries.push_back({k, J, delta, elapsed});
    previous_ = J;
    return delta >= 0.0 && delta < cfg_.tol;
  }

  auto take() -> SolverTrace { return std::move(trace_); }

private:
  SolverConfig const &cfg_;
  SolverTrace trace_;
  double previous_ = 0.0;
  double excluded_ms_ = 0.0;
  Clock::time_point start_;
};

void check_data(KSpaceData const &y, TransferOperator const &op)
{
  check_image_dims(op.dims(), y.dims(), "k-space data");
  if (y.dims().nc != op.dims().nc) {
    throw Error(fmt::format("k-space data: dimension mismatch on axis nc (expected {}, got {})", op.dims().nc, y.dims().nc));
  }
}

void check_regularizer(RegularizerKind k, Dims const &d)
{
  if (k == RegularizerKind::TemporalTV && d.nt < 2) {
    throw Error(fmt::format("temporal TV needs n_t >= 2 (got {})", d.nt));
  }
}

} // namespace

auto synthesis_coefficient_update(SpectralCache const &cache,
                                  RegularizerKind psi,
                                  double mu,
                                  ImageSequence const &adjoint_data,
                                  CoefficientField const &target,
                                  bool literal_complement) -> CoefficientField
{
  if (!is_tight_frame(psi)) { throw Error(fmt::format("synthesis update needs a tight frame, {} is not", to_string(psi))); }
  ImageSequence rhs = adjoint_data;
  axpy(Cx{mu}, apply_regularizer_adjoint(psi, target), rhs);
  CoefficientField w = apply_regularizer(psi, apply_regularized_inverse(cache, mu, rhs));
  if (literal_complement || !is_orthonormal(psi)) {
    CoefficientField a = apply_regularizer(psi, adjoint_data);
    axpy(Cx{mu}, target, a);
    axpy(Cx{1.0 / mu}, frame_complement(psi, a), w);
  }
  return w;
}

auto admm_synthesis(KSpaceData const &y,
                    TransferOperator const &op,
                    SpectralCache const &cache,
                    RegularizerKind psi,
                    SolverConfig const &cfg) -> SolveResult
{
  cfg.validate();
  check_data(y, op);
  if (!is_tight_frame(psi)) {
    throw Error(fmt::format("synthesis ADMM needs a tight frame; {} is a penalty operator", to_string(psi)));
  }
  double const threshold = cfg.lambda / (2.0 * cfg.mu);

  ImageSequence const adjoint_data = op.adjoint(y);
  CoefficientField w = apply_regularizer(psi, adjoint_data);
  CoefficientField d(w.nv(), w.nh(), w.frames());
  CoefficientField v = w;

  Recorder rec(cfg, [&] { return objective_synthesis(y, op, psi, w, cfg.lambda); });
  SolveResult result;
  Index k = 0;
  while (k < cfg.max_iters) {
    ++k;
    v = soft_threshold(w - d, threshold);
    w = synthesis_coefficient_update(cache, psi, cfg.mu, adjoint_data, v + d);
    d -= w - v;
    if (rec.due(k) && rec.log(k, [&] {
          return cfg.lambda * norm1(v) + data_misfit(y, op, apply_regularizer_adjoint(psi, w));
        })) {
      result.converged = true;
      break;
    }
  }
  result.x = apply_regularizer_adjoint(psi, w);
  result.trace = rec.take();
  result.iterations = k;
  return result;
}

auto admm_analysis(KSpaceData const &y,
                   TransferOperator const &op,
                   SpectralCache const &cache,
                   RegularizerKind r,
                   SolverConfig const &cfg) -> SolveResult
{
  cfg.validate();
  check_data(y, op);
  check_regularizer(r, op.dims());
  double const mu2 = cfg.mu;
  double const ratio = cfg.mu_ratio;
  double const threshold = cfg.lambda / (2.0 * (mu2 / ratio));

  ImageSequence const adjoint_data = op.adjoint(y);
  ImageSequence x = adjoint_data;
  ImageSequence m = x;
  ImageSequence d2(x.dims());
  CoefficientField Rm = apply_regularizer(r, m);
  CoefficientField d1(Rm.nv(), Rm.nh(), Rm.frames());

  auto objective = [&] { return objective_analysis(y, op, r, x, cfg.lambda); };
  Recorder rec(cfg, objective);
  SolveResult result;
  Index k = 0;
  while (k < cfg.max_iters) {
    ++k;
    CoefficientField const v = soft_threshold(Rm + d1, threshold);
    m = solve_regularizer_normal(r, ratio, apply_regularizer_adjoint(r, v - d1) + ratio * (x + d2));
    ImageSequence rhs = adjoint_data;
    axpy(Cx{mu2}, m - d2, rhs);
    x = apply_regularized_inverse(cache, mu2, rhs);
    Rm = apply_regularizer(r, m);
    d1 -= v - Rm;
    d2 -= m - x;
    if (rec.due(k) && rec.log(k, objective)) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  result.trace = rec.take();
  result.iterations = k;
  return result;
}

auto fista(KSpaceData const &y,
           TransferOperator const &op,
           NormalBlocks const &blocks,
           double max_eigenvalue,
           RegularizerKind psi,
           SolverConfig const &cfg) -> SolveResult
{
  cfg.validate();
  check_data(y, op);
  check_image_dims(op.dims(), blocks.dims(), "normal blocks");
  if (!is_tight_frame(psi)) { throw Error(fmt::format("FISTA needs a tight frame; {} is a penalty operator", to_string(psi))); }
  if (!(max_eigenvalue > 0.0)) { throw Error("FISTA needs a positive Lipschitz bound"); }
  // gradient of ||y - H Psi' w||^2 is 2 Psi (H'H Psi' w - H'y)
  double const lipschitz = 2.0 * max_eigenvalue;
  double const threshold = cfg.lambda / lipschitz;

  ImageSequence const adjoint_data = op.adjoint(y);
  CoefficientField w = apply_regularizer(psi, adjoint_data);
  CoefficientField z = w;
  double t = 1.0;

  auto objective = [&] { return objective_synthesis(y, op, psi, w, cfg.lambda); };
  Recorder rec(cfg, objective);
  SolveResult result;
  Index k = 0;
  while (k < cfg.max_iters) {
    ++k;
    CoefficientField const grad =
      2.0 * apply_regularizer(psi, apply_normal(blocks, apply_regularizer_adjoint(psi, z)) - adjoint_data);
    CoefficientField step = z;
    axpy(Cx{-1.0 / lipschitz}, grad, step);
    CoefficientField next = soft_threshold(step, threshold);
    double const t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next;
    axpy(Cx{(t - 1.0) / t_next}, next - w, z);
    w = std::move(next);
    t = t_next;
    if (rec.due(k) && rec.log(k, objective)) {
      result.converged = true;
      break;
    }
  }
  result.x = apply_regularizer_adjoint(psi, w);
  result.trace = rec.take();
  result.iterations = k;
  return result;
}

auto p1_split_bregman(KSpaceData const &y,
                      TransferOperator const &op,
                      NormalBlocks const &blocks,
                      RegularizerKind r,
                      SolverConfig const &cfg) -> SolveResult
{
  cfg.validate();
  check_data(y, op);
  check_image_dims(op.dims(), blocks.dims(), "normal blocks");
  check_regularizer(r, op.dims());
  double const mu = cfg.mu;
  double const threshold = cfg.lambda / (2.0 * mu);

  ImageSequence const adjoint_data = op.adjoint(y);
  ImageSequence x = adjoint_data;
  CoefficientField Rx = apply_regularizer(r, x);
  CoefficientField d(Rx.nv(), Rx.nh(), Rx.frames());

  // mu R'R + H'H
  LinearOperator const system = [&](ImageSequence const &z) {
    ImageSequence out = apply_normal(blocks, z);
    axpy(Cx{mu}, apply_regularizer_adjoint(r, apply_regularizer(r, z)), out);
    return out;
  };

  auto objective = [&] { return objective_analysis(y, op, r, x, cfg.lambda); };
  Recorder rec(cfg, objective);
  SolveResult result;
  Index k = 0;
  while (k < cfg.max_iters) {
    ++k;
    CoefficientField const v = soft_threshold(Rx - d, threshold);
    ImageSequence rhs = adjoint_data;
    axpy(Cx{mu}, apply_regularizer_adjoint(r, v + d), rhs);
    x = conjugate_gradient(system, rhs, std::move(x), cfg.cg_iters);
    Rx = apply_regularizer(r, x);
    d -= Rx - v;
    if (rec.due(k) && rec.log(k, objective)) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  result.trace = rec.take();
  result.iterations = k;
  return result;
}

auto conjugate_gradient(LinearOperator const &apply_a, ImageSequence const &b, ImageSequence x0, int iters)
  -> ImageSequence
{
  if (iters < 1) { throw Error(fmt::format("CG needs at least one iteration (got {})", iters)); }
  if (!x0.same_shape(b)) { throw Error("CG: initial guess and right-hand side differ in shape"); }
  ImageSequence x = std::move(x0);
  ImageSequence r = b - apply_a(x);
  ImageSequence p = r;
  double rr = squared_norm(r);
  for (int it = 0; it < iters; ++it) {
    ImageSequence const ap = apply_a(p);
    double const pap = dot(p, ap).real();
    if (!(pap > 0.0)) { break; }
    double const alpha = rr / pap;
    axpy(Cx{alpha}, p, x);
    axpy(Cx{-alpha}, ap, r);
    double const rr_next = squared_norm(r);
    double const beta = rr_next / rr;
    rr = rr_next;
    p = r + beta * p;
  }
  return x;
}

auto precompute(TransferOperator const &op) -> Precomputed
{
  auto const t0 = Clock::now();
  NormalBlocks blocks = build_normal_blocks(op);
  SpectralCache cache = precompute_cache(blocks);
  double const ms = ms_between(t0, Clock::now());
  return {std::move(blocks), std::move(cache), ms};
}

auto solve(Algorithm a,
           KSpaceData const &y,
           TransferOperator const &op,
           Precomputed const &pre,
           RegularizerKind r,
           SolverConfig const &cfg) -> SolveResult
{
  if (!compatible(a, r)) {
    throw Error(fmt::format("{} needs a tight frame; {} is not one", to_string(a), to_string(r)));
  }
  switch (a) {
  case Algorithm::AdmmSynthesis: return admm_synthesis(y, op, pre.cache, r, cfg);
  case Algorithm::AdmmAnalysis: return admm_analysis(y, op, pre.cache, r, cfg);
  case Algorithm::Fista: return fista(y, op, pre.blocks, pre.cache.max_eigenvalue(), r, cfg);
  case Algorithm::P1: return p1_split_bregman(y, op, pre.blocks, r, cfg);
  }
  throw Error("unknown algorithm");
}

} // namespace csmri
