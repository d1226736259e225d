#include "csmri/cli.hpp"

#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "csmri/benchmark.hpp"
#include "csmri/io.hpp"
#include "csmri/metrics.hpp"
#include "csmri/parallel.hpp"
#include "csmri/phantom.hpp"
#include "csmri/solvers.hpp"

namespace csmri {

namespace {

constexpr int usage_error = 2;

class UsageError : public Error
{
public:
  using Error::Error;
};

struct PhantomArgs
{
  Index nv = 32, nh = 32, nt = 8, nc = 4;
  Index period = 0;
  std::uint64_t seed = 1;
  std::string out_image, out_sens;
};

struct MaskArgs
{
  Index nv = 32, nt = 8;
  double accel = 4.0;
  Index center = 4;
  std::uint64_t seed = 1;
  std::string out;
};

struct AcquireArgs
{
  std::string image, sens, mask, out;
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;
};

struct ReconArgs
{
  std::string kspace, sens, mask, out, trace, frames;
  std::string algorithm = "admm-synthesis";
  std::string regularizer;
  SolverConfig cfg;
  int threads = 0;
};

struct BenchArgs
{
  std::string preset = "desk";
  double delta_target = 0.001;
  int repeats = 3;
  int max_iters = 200;
  std::uint64_t seed = 1;
  int threads = 0;
  std::vector<std::string> solvers;
  std::string out_report;
};

struct MetricsArgs
{
  std::string recon, reference;
};

void run_phantom(PhantomArgs const &a)
{
  PhantomSpec spec;
  spec.dims = Dims{a.nv, a.nh, a.nt, a.nc};
  spec.motion_period = a.period > 0 ? a.period : a.nt;
  spec.seed = a.seed;
  io::write_dataset(a.out_image, generate_phantom(spec));
  io::write_dataset(a.out_sens, generate_sensitivities(spec.dims, a.seed));
}

void run_mask(MaskArgs const &a)
{
  io::write_dataset(a.out, generate_mask(MaskSpec{a.nv, a.nt, a.accel, a.center, a.seed}));
}

void run_acquire(AcquireArgs const &a)
{
  auto const x = io::read_image(a.image);
  auto const s = io::read_sensitivities(a.sens);
  auto const m = io::read_mask(a.mask);
  io::write_dataset(a.out, simulate_acquisition(x, s, m, a.noise_sigma, a.seed));
}

auto parse_or_usage(auto parse, std::string const &s)
{
  try {
    return parse(s);
  } catch (Error const &e) {
    throw UsageError(e.what());
  }
}

void run_recon(ReconArgs const &a)
{
  Algorithm const algorithm = parse_or_usage(parse_algorithm, a.algorithm);
  RegularizerKind const reg =
    a.regularizer.empty()
      ? (algorithm == Algorithm::AdmmAnalysis ? RegularizerKind::TemporalTV : RegularizerKind::TemporalDFT)
      : parse_or_usage(parse_regularizer, a.regularizer);
  if (!compatible(algorithm, reg)) {
    throw UsageError(fmt::format("--algorithm {} requires a tight frame; --regularizer {} is a penalty operator",
                                 to_string(algorithm), to_string(reg)));
  }
  try {
    a.cfg.validate();
  } catch (Error const &e) {
    throw UsageError(e.what());
  }
  parallel::set_threads(a.threads);

  std::optional<SamplingMask> mask;
  if (!a.mask.empty()) { mask = io::read_mask(a.mask); }
  KSpaceData const y = io::read_kspace(a.kspace, mask);
  TransferOperator const op(io::read_sensitivities(a.sens), y.mask());
  Precomputed const pre = precompute(op);
  SolveResult const res = solve(algorithm, y, op, pre, reg, a.cfg);

  io::write_dataset(a.out, res.x);
  if (!a.trace.empty()) {
    auto const &c = a.cfg;
    io::write_trace(a.trace, res.trace,
                    {fmt::format("algorithm={} regularizer={}", to_string(algorithm), to_string(reg)),
                     fmt::format("lambda={} mu={} mu_ratio={} cg_iters={} max_iters={} tol={}", c.lambda, c.mu,
                                 c.mu_ratio, c.cg_iters, c.max_iters, c.tol),
                     fmt::format("iterations={} converged={}", res.iterations, res.converged)});
  }
  if (!a.frames.empty()) { io::export_frames(res.x, a.frames); }
  std::cout << fmt::format("{} ({}): {} iterations, converged={}, objective={:.9g}, precompute {:.1f} ms\n",
                           to_string(algorithm), to_string(reg), res.iterations, res.converged,
                           res.trace.entries.empty() ? res.trace.initial_objective : res.trace.entries.back().objective,
                           pre.build_ms);
}

auto bench_solver(std::string const &name, SolverConfig const &base) -> SolverSpec
{
  SolverSpec s;
  s.name = name;
  s.cfg = base;
  if (name == "admm-synthesis") {
    s.algorithm = Algorithm::AdmmSynthesis;
  } else if (name == "fista") {
    s.algorithm = Algorithm::Fista;
  } else if (name == "p1-tdft-10") {
    s.algorithm = Algorithm::P1;
    s.cfg.cg_iters = 10;
  } else if (name == "admm-analysis") {
    s.algorithm = Algorithm::AdmmAnalysis;
    s.regularizer = RegularizerKind::TemporalTV;
  } else if (name == "p1-ttv-10" || name == "p1-ttv-5") {
    s.algorithm = Algorithm::P1;
    s.regularizer = RegularizerKind::TemporalTV;
    s.cfg.cg_iters = name == "p1-ttv-10" ? 10 : 5;
  } else {
    throw UsageError(fmt::format("unknown benchmark solver '{}'", name));
  }
  return s;
}

void run_bench(BenchArgs const &a)
{
  ProblemSpec spec;
  std::vector<std::string> names = a.solvers;
  if (a.preset == "desk") {
    spec = desk_preset(a.seed);
    if (names.empty()) { names = {"admm-synthesis", "fista", "p1-tdft-10", "admm-analysis", "p1-ttv-10", "p1-ttv-5"}; }
  } else if (a.preset == "paper-scale") {
    spec = paper_scale_preset(a.seed);
    if (names.empty()) { names = {"admm-synthesis", "admm-analysis"}; }
  } else {
    throw UsageError(fmt::format("unknown preset '{}' (expected desk or paper-scale)", a.preset));
  }
  SolverConfig base;
  base.max_iters = a.max_iters;
  // Run the full iteration budget; time-to-target is read off the trace.
  base.tol = 0.0;
  std::vector<SolverSpec> solvers;
  for (auto const &n : names) { solvers.push_back(bench_solver(n, base)); }
  try {
    base.validate();
  } catch (Error const &e) {
    throw UsageError(e.what());
  }

  parallel::set_threads(a.threads);
  SyntheticProblem p = simulate_problem(spec);
  BenchmarkProblem problem{std::move(p.data), TransferOperator(p.sens, p.mask), std::move(p.truth)};
  auto const rows = run_benchmark(problem, solvers, BenchmarkOptions{a.delta_target, a.repeats, false});
  write_report(a.out_report, rows);
  for (auto const &r : rows) {
    std::cout << fmt::format("{:<16} iters-to-target {:>4}  time-to-target {:>10.2f} ms  final J {:.9g}  nrmse {:.4f}\n",
                             r.solver, r.iterations_to_target, r.time_to_target_ms, r.final_objective, r.nrmse);
  }
  if (!rows.empty()) { std::cout << fmt::format("precompute (excluded): {:.2f} ms\n", rows.front().precompute_ms); }
}

void run_metrics(MetricsArgs const &a)
{
  std::cout << fmt::format("{:.12g}\n", nrmse(io::read_image(a.recon), io::read_image(a.reference)));
}

} // namespace

auto run_cli(std::vector<std::string> args) -> int
{
  CLI::App app{"Compressed-sensing dynamic parallel MRI reconstruction"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style file with [recon], [bench], ... sections; command-line flags take precedence");

  PhantomArgs pa;
  auto *phantom = app.add_subcommand("phantom", "Generate a dynamic phantom and coil sensitivities");
  phantom->add_option("--nv", pa.nv)->check(CLI::PositiveNumber);
  phantom->add_option("--nh", pa.nh)->check(CLI::PositiveNumber);
  phantom->add_option("--nt", pa.nt)->check(CLI::PositiveNumber);
  phantom->add_option("--nc", pa.nc)->check(CLI::PositiveNumber);
  phantom->add_option("--period", pa.period, "Motion period in frames (default n_t)");
  phantom->add_option("--seed", pa.seed);
  phantom->add_option("--out-image", pa.out_image)->required();
  phantom->add_option("--out-sens", pa.out_sens)->required();

  MaskArgs ma;
  auto *mask = app.add_subcommand("mask", "Generate a variable-density line mask");
  mask->add_option("--nv", ma.nv)->check(CLI::PositiveNumber);
  mask->add_option("--nt", ma.nt)->check(CLI::PositiveNumber);
  mask->add_option("--accel", ma.accel);
  mask->add_option("--center", ma.center);
  mask->add_option("--seed", ma.seed);
  mask->add_option("--out", ma.out)->required();

  AcquireArgs aa;
  auto *acquire = app.add_subcommand("acquire", "Simulate undersampled noisy multi-coil k-space");
  acquire->add_option("--image", aa.image)->required()->check(CLI::ExistingFile);
  acquire->add_option("--sens", aa.sens)->required()->check(CLI::ExistingFile);
  acquire->add_option("--mask", aa.mask)->required()->check(CLI::ExistingFile);
  acquire->add_option("--noise-sigma", aa.noise_sigma);
  acquire->add_option("--seed", aa.seed);
  acquire->add_option("--out", aa.out)->required();

  ReconArgs ra;
  auto *recon = app.add_subcommand("recon", "Reconstruct an image sequence");
  recon->add_option("--kspace", ra.kspace)->required()->check(CLI::ExistingFile);
  recon->add_option("--sens", ra.sens)->required()->check(CLI::ExistingFile);
  recon->add_option("--mask", ra.mask, "Required when the k-space file has no embedded mask")->check(CLI::ExistingFile);
  recon->add_option("--algorithm", ra.algorithm)
    ->check(CLI::IsMember({"admm-synthesis", "admm-analysis", "fista", "p1"}));
  recon->add_option("--regularizer", ra.regularizer, "tdft or ttv (default: ttv for admm-analysis, else tdft)")
    ->check(CLI::IsMember({"tdft", "ttv"}));
  recon->add_option("--lambda", ra.cfg.lambda);
  recon->add_option("--mu", ra.cfg.mu);
  recon->add_option("--mu-ratio", ra.cfg.mu_ratio);
  recon->add_option("--cg-iters", ra.cfg.cg_iters);
  recon->add_option("--max-iters", ra.cfg.max_iters);
  recon->add_option("--tol", ra.cfg.tol);
  recon->add_option("--log-every", ra.cfg.log_every, "Evaluate the objective every n-th iteration");
  recon->add_option("--threads", ra.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  recon->add_option("--out", ra.out)->required();
  recon->add_option("--trace", ra.trace);
  recon->add_option("--frames", ra.frames, "Directory for frame_%03d.pgm exports");

  BenchArgs ba;
  auto *bench = app.add_subcommand("bench", "Time solvers to a convergence target on a synthetic problem");
  bench->add_option("--preset", ba.preset)->check(CLI::IsMember({"desk", "paper-scale"}));
  bench->add_option("--delta-target", ba.delta_target);
  bench->add_option("--repeats", ba.repeats)->check(CLI::PositiveNumber);
  bench->add_option("--max-iters", ba.max_iters)->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed);
  bench->add_option("--threads", ba.threads)->check(CLI::NonNegativeNumber);
  bench->add_option("--solvers", ba.solvers,
                    "Subset of admm-synthesis, fista, p1-tdft-10, admm-analysis, p1-ttv-10, p1-ttv-5");
  bench->add_option("--out-report", ba.out_report)->required();

  MetricsArgs mea;
  auto *metrics = app.add_subcommand("metrics", "Print the NRMSE of a reconstruction against a reference");
  metrics->add_option("--recon", mea.recon)->required()->check(CLI::ExistingFile);
  metrics->add_option("--reference", mea.reference)->required()->check(CLI::ExistingFile);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (CLI::CallForHelp const &e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const &e) {
    return app.exit(e);
  } catch (CLI::ParseError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage_error;
  }

  try {
    if (phantom->parsed()) { run_phantom(pa); }
    if (mask->parsed()) { run_mask(ma); }
    if (acquire->parsed()) { run_acquire(aa); }
    if (recon->parsed()) { run_recon(ra); }
    if (bench->parsed()) { run_bench(ba); }
    if (metrics->parsed()) { run_metrics(mea); }
  } catch (UsageError const &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

auto cli_main(int argc, char **argv) -> int
{
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) { args.emplace_back(argv[i]); }
  return run_cli(std::move(args));
}

} // namespace csmri
