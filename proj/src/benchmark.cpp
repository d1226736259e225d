#include "csmri/benchmark.hpp"

#include <fstream>

#include <fmt/format.h>

#include "csmri/metrics.hpp"
#include "csmri/parallel.hpp"

namespace csmri {

auto first_below(SolverTrace const &trace, double target) -> std::optional<TargetHit>
{
  for (auto const &e : trace.entries) {
    if (e.delta >= 0.0 && e.delta < target) { return TargetHit{e.iter, e.elapsed_ms}; }
  }
  return std::nullopt;
}

auto objective_at_time(SolverTrace const &trace, double ms) -> double
{
  double value = trace.initial_objective;
  for (auto const &e : trace.entries) {
    if (e.elapsed_ms > ms) { break; }
    value = e.objective;
  }
  return value;
}

auto describe(SolverSpec const &spec) -> std::string
{
  auto const &c = spec.cfg;
  return fmt::format("algorithm={} regularizer={} lambda={} mu={} mu_ratio={} cg_iters={} max_iters={} tol={}",
                     to_string(spec.algorithm), to_string(spec.regularizer), c.lambda, c.mu, c.mu_ratio, c.cg_iters,
                     c.max_iters, c.tol);
}

auto run_benchmark(BenchmarkProblem const &problem, std::vector<SolverSpec> const &solvers, BenchmarkOptions const &opts)
  -> std::vector<BenchmarkRow>
{
  if (solvers.empty()) { throw Error("benchmark needs at least one solver"); }
  if (opts.repeats < 1) { throw Error("benchmark needs at least one repeat"); }
  Precomputed const pre = precompute(problem.op);

  std::vector<BenchmarkRow> rows(solvers.size());
  auto run_one = [&](Index s) {
    auto const &spec = solvers[size_t(s)];
    BenchmarkRow row;
    row.solver = spec.name;
    row.config = describe(spec);
    row.precompute_ms = pre.build_ms;
    std::optional<Index> first_iters;
    for (int r = 0; r < opts.repeats; ++r) {
      SolveResult res;
      try {
        res = solve(spec.algorithm, problem.data, problem.op, pre, spec.regularizer, spec.cfg);
      } catch (std::exception const &e) {
        throw Error(fmt::format("solver '{}' failed: {}", spec.name, e.what()));
      }
      auto const hit = first_below(res.trace, opts.delta_target);
      Index const iters = hit ? hit->iteration : -1;
      if (first_iters && *first_iters != iters) { row.repeats_agree = false; }
      if (!first_iters) { first_iters = iters; }
      double const total = res.trace.entries.empty() ? 0.0 : res.trace.entries.back().elapsed_ms;
      bool const faster = r == 0 || (hit ? hit->elapsed_ms < row.time_to_target_ms : total < row.total_ms);
      if (faster) {
        row.iterations_to_target = iters;
        row.time_to_target_ms = hit ? hit->elapsed_ms : -1.0;
        row.total_ms = total;
        row.iterations = res.iterations;
        row.final_objective = res.trace.entries.empty() ? res.trace.initial_objective : res.trace.entries.back().objective;
        row.nrmse = nrmse(res.x, problem.reference);
      }
    }
    rows[size_t(s)] = std::move(row);
  };

  if (opts.concurrent) {
    parallel::for_each(Index(solvers.size()), run_one);
  } else {
    for (Index s = 0; s < Index(solvers.size()); ++s) { run_one(s); }
  }
  return rows;
}

void write_report(std::filesystem::path const &path, std::vector<BenchmarkRow> const &rows)
{
  std::ofstream f(path, std::ios::trunc);
  if (!f) { throw Error(fmt::format("cannot open {} for writing", path.string())); }
  f << "# solver time excludes normal-block and eigendecomposition precompute (precompute_ms) and objective logging\n";
  f << "solver,config,iterations_to_target,time_to_target_ms,iterations,total_ms,final_objective,nrmse,precompute_ms,"
       "repeats_agree\n";
  for (auto const &r : rows) {
    f << fmt::format("{},\"{}\",{},{:.6f},{},{:.6f},{:.17g},{:.17g},{:.6f},{}\n", r.solver, r.config,
                     r.iterations_to_target, r.time_to_target_ms, r.iterations, r.total_ms, r.final_objective, r.nrmse,
                     r.precompute_ms, r.repeats_agree ? 1 : 0);
  }
  if (!f) { throw Error(fmt::format("write to {} failed", path.string())); }
}

} // namespace csmri
