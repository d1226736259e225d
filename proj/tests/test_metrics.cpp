#include <doctest.h>

#include <cmath>
#include <fstream>

#include "csmri/benchmark.hpp"
#include "csmri/metrics.hpp"
#include "csmri/phantom.hpp"
#include "oracles.hpp"

using namespace csmri;

namespace {

auto make_trace(double j0, std::vector<double> const &js) -> SolverTrace
{
  SolverTrace tr;
  tr.initial_objective = j0;
  double prev = j0;
  for (size_t k = 0; k < js.size(); ++k) {
    tr.entries.push_back({Index(k + 1), js[k], (prev - js[k]) / js[k], 10.0 * double(k + 1)});
    prev = js[k];
  }
  return tr;
}

auto desk_problem() -> BenchmarkProblem
{
  auto p = simulate_problem(desk_preset(1));
  TransferOperator op(p.sens, p.mask);
  return {std::move(p.data), std::move(op), std::move(p.truth)};
}

} // namespace

TEST_CASE("objective examples")
{
  std::mt19937_64 rng(1);
  Dims const d{6, 4, 4, 2};
  auto const s = oracle::random_sensitivities(d, rng);
  auto const m = oracle::random_mask(d.nv, d.nt, rng);
  TransferOperator const op(s, m);
  auto const x = oracle::random_image(d, rng);
  auto const y = op.forward(x);

  CoefficientField const w0(d.nv, d.nh, d.nt);
  CHECK(objective_synthesis(y, op, RegularizerKind::TemporalDFT, w0, 0.3) ==
        doctest::Approx(squared_norm(y)).epsilon(1e-14));
  CHECK(data_misfit(y, op, x) <= 1e-24 * squared_norm(y));

  // dense oracle
  double const lambda = 0.7;
  auto const H = oracle::encoding_matrix(s, m);
  auto const z = oracle::random_image(d, rng);
  Eigen::MatrixXd const D = oracle::difference_matrix(d.nv, d.nh, d.nt);
  oracle::Vector const r = oracle::to_vector(y) - H * oracle::to_vector(z);
  oracle::Vector const dz = D.cast<Cx>() * oracle::to_vector(z);
  double l1 = 0.0;
  for (Index i = 0; i < dz.size(); ++i) { l1 += std::abs(dz[i]); }
  CHECK(objective_analysis(y, op, RegularizerKind::TemporalTV, z, lambda) ==
        doctest::Approx(lambda * l1 + r.squaredNorm()).epsilon(1e-12));

  auto const P = oracle::temporal_dft_matrix(d.nv, d.nh, d.nt);
  oracle::Vector const pz = P * oracle::to_vector(z);
  double l1p = 0.0;
  for (Index i = 0; i < pz.size(); ++i) { l1p += std::abs(pz[i]); }
  auto const w = temporal_dft_forward(z);
  CHECK(objective_synthesis(y, op, RegularizerKind::TemporalDFT, w, lambda) ==
        doctest::Approx(lambda * l1p + r.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("misfit counts sampled rows only")
{
  std::mt19937_64 rng(2);
  Dims const d{6, 3, 2, 2};
  auto const m = oracle::random_mask(d.nv, d.nt, rng);
  TransferOperator const op(oracle::random_sensitivities(d, rng), m);
  auto const x = oracle::random_image(d, rng);
  auto const y = op.forward(oracle::random_image(d, rng));
  auto const hx = op.forward(x);
  double full = 0.0;
  for (Index i = 0; i < y.size(); ++i) { full += std::norm(y[i] - hx[i]); }
  CHECK(data_misfit(y, op, x) == doctest::Approx(full).epsilon(1e-13));
}

TEST_CASE("delta ratio")
{
  auto const tr = make_trace(10.0, {8.0, 7.9});
  CHECK(delta_ratio(tr, 1) == doctest::Approx(2.0 / 8.0));
  CHECK(delta_ratio(tr, 2) == doctest::Approx(0.1 / 7.9).epsilon(1e-14));
  CHECK(delta_ratio(5.0, 5.0) == 0.0);
  CHECK(delta_ratio(4.0, 5.0) < 0.0);
  CHECK_THROWS_AS(delta_ratio(1.0, 0.0), Error);
  CHECK_THROWS_AS(delta_ratio(tr, 3), Error);
  CHECK_THROWS_AS(delta_ratio(tr, 0), Error);
}

TEST_CASE("nrmse")
{
  ImageSequence ref(2, 1, 1), x(2, 1, 1);
  ref[0] = 3.0;
  ref[1] = Cx{0.0, 4.0};
  CHECK(nrmse(ref, ref) == 0.0);
  CHECK(nrmse(x, ref) == doctest::Approx(1.0));
  x[0] = 3.0;
  CHECK(nrmse(x, ref) == doctest::Approx(0.8));
  CHECK_THROWS_AS(nrmse(ref, ImageSequence(2, 1, 1)), Error);
}

TEST_CASE("target crossing and time lookup")
{
  auto const tr = make_trace(10.0, {5.0, 4.0, 4.5, 4.4, 4.39});
  // entry 3 has negative delta and does not count
  auto const hit = first_below(tr, 0.01);
  REQUIRE(hit);
  CHECK(hit->iteration == 5);
  CHECK(hit->elapsed_ms == 50.0);
  auto const loose = first_below(tr, 1e9);
  REQUIRE(loose);
  CHECK(loose->iteration == 1);
  CHECK_FALSE(first_below(tr, 1e-6));

  CHECK(objective_at_time(tr, 0.0) == 10.0);
  CHECK(objective_at_time(tr, 25.0) == 4.0);
  CHECK(objective_at_time(tr, 1e6) == 4.39);
}

TEST_CASE("benchmark on the desk problem")
{
  auto const problem = desk_problem();
  SolverConfig cfg;
  cfg.tol = 0.0;
  cfg.max_iters = 80;
  std::vector<SolverSpec> const solvers{{"admm-synthesis", Algorithm::AdmmSynthesis, RegularizerKind::TemporalDFT, cfg},
                                        {"fista", Algorithm::Fista, RegularizerKind::TemporalDFT, cfg}};
  BenchmarkOptions opts;
  opts.repeats = 2;
  auto const rows = run_benchmark(problem, solvers, opts);
  REQUIRE(rows.size() == 2);
  for (auto const &row : rows) {
    CAPTURE(row.solver);
    CHECK(row.repeats_agree);
    CHECK(row.iterations == 80);
    CHECK(row.iterations_to_target > 0);
    CHECK(row.time_to_target_ms >= 0.0);
    CHECK(row.precompute_ms > 0.0);
    CHECK(row.nrmse < 0.5);
  }
  CHECK(rows[0].iterations_to_target < rows[1].iterations_to_target);

  auto const path = std::filesystem::temp_directory_path() / "csmri_report_test.csv";
  write_report(path, rows);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind('#', 0) == 0);
  std::getline(in, line);
  CHECK(line == "solver,config,iterations_to_target,time_to_target_ms,iterations,total_ms,final_objective,nrmse,"
                "precompute_ms,repeats_agree");
  std::filesystem::remove(path);

  auto bad = solvers;
  bad[0].regularizer = RegularizerKind::TemporalTV;
  CHECK_THROWS_WITH_AS(run_benchmark(problem, bad, opts), doctest::Contains("admm-synthesis"), Error);
}
