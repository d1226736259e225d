#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "solvers.hpp"
#include "transfer_operator.hpp"
#include "types.hpp"

namespace csmri {

struct SolverSpec
{
  std::string name;
  Algorithm algorithm = Algorithm::AdmmSynthesis;
  RegularizerKind regularizer = RegularizerKind::TemporalDFT;
  SolverConfig cfg;
};

struct BenchmarkProblem
{
  KSpaceData data;
  TransferOperator op;
  ImageSequence reference;
};

struct BenchmarkOptions
{
  double delta_target = 0.001;
  int repeats = 3;
  bool concurrent = false; // run solvers side by side; timings are then not comparable
};

struct BenchmarkRow
{
  std::string solver;
  std::string config;
  Index iterations_to_target = -1; // -1 when the target was never reached
  double time_to_target_ms = -1.0;
  Index iterations = 0;
  double total_ms = 0.0;
  double final_objective = 0.0;
  double nrmse = 0.0;
  double precompute_ms = 0.0;
  bool repeats_agree = true; // identical iterations-to-target over every repeat
};

struct TargetHit
{
  Index iteration;
  double elapsed_ms;
};

// First logged iteration with 0 <= delta < target.
auto first_below(SolverTrace const &trace, double target) -> std::optional<TargetHit>;

// Objective at elapsed time `ms`, held from the last entry at or before it.
auto objective_at_time(SolverTrace const &trace, double ms) -> double;

auto describe(SolverSpec const &spec) -> std::string;

/*
 * Runs every solver `repeats` times and keeps the fastest repeat's
 * time-to-target. Normal blocks and their eigendecomposition are built once;
 * that time is reported separately and never charged to a solver.
 */
auto run_benchmark(BenchmarkProblem const &problem, std::vector<SolverSpec> const &solvers, BenchmarkOptions const &opts)
  -> std::vector<BenchmarkRow>;

void write_report(std::filesystem::path const &path, std::vector<BenchmarkRow> const &rows);

} // namespace csmri
