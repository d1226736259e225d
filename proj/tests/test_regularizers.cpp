#include <doctest.h>

#include "csmri/regularizers.hpp"
#include "oracles.hpp"

using namespace csmri;

namespace {

auto close(Cx a, Cx b, double tol = 1e-14) -> bool { return std::abs(a - b) <= tol; }

auto series(std::initializer_list<Cx> values) -> ImageSequence
{
  ImageSequence x(1, 1, Index(values.size()));
  Index t = 0;
  for (Cx v : values) { x(0, 0, t++) = v; }
  return x;
}

} // namespace

TEST_CASE("soft threshold examples")
{
  CHECK(close(soft_threshold(Cx{3.0}, 1.0), Cx{2.0}));
  CHECK(close(soft_threshold(Cx{-3.0}, 1.0), Cx{-2.0}));
  CHECK(soft_threshold(Cx{0.5}, 1.0) == Cx{});
  CHECK(close(soft_threshold(Cx{-3.0, 4.0}, 1.0), Cx{-2.4, 3.2}));
  CHECK(soft_threshold(Cx{1.0}, 1.0) == Cx{});
  CHECK(close(soft_threshold(Cx{0.3, -0.2}, 0.0), Cx{0.3, -0.2}));

  CoefficientField w(1, 1, 1);
  CHECK_THROWS_AS(soft_threshold(w, -0.1), Error);
}

TEST_CASE("soft threshold is the prox of tau |.|")
{
  // brute-force minimizer of tau|z| + |z - a|^2 / 2 on a grid of step 1e-3
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Cx const a = 2.0 * oracle::random_complex(rng);
    double const tau = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
    double best = 1e300;
    Cx arg{};
    int const r = int(std::ceil((tau + 0.02) / 1e-3));
    int const ci = int(std::lround(a.real() / 1e-3)), cj = int(std::lround(a.imag() / 1e-3));
    for (int i = ci - r; i <= ci + r; ++i) {
      for (int j = cj - r; j <= cj + r; ++j) {
        Cx const z{i * 1e-3, j * 1e-3};
        double const f = tau * std::abs(z) + 0.5 * std::norm(z - a);
        if (f < best) { best = f, arg = z; }
      }
    }
    CHECK(std::abs(soft_threshold(a, tau) - arg) <= 2e-3);
  }
}

TEST_CASE("temporal differences")
{
  auto const d = temporal_diff(series({1.0, 2.0, 4.0}));
  REQUIRE(d.frames() == 2);
  CHECK(close(d(0, 0, 0), 1.0));
  CHECK(close(d(0, 0, 1), 2.0));

  CoefficientField v(1, 1, 1);
  v(0, 0, 0) = 1.0;
  auto const a = temporal_diff_adjoint(v);
  REQUIRE(a.frames() == 2);
  CHECK(close(a(0, 0, 0), -1.0));
  CHECK(close(a(0, 0, 1), 1.0));

  CHECK_THROWS_AS(temporal_diff(series({1.0})), Error);
}

TEST_CASE("temporal differences match the dense operator")
{
  std::mt19937_64 rng(5);
  Dims const d{3, 2, 5, 1};
  auto const x = oracle::random_image(d, rng);
  Eigen::MatrixXcd const D = oracle::difference_matrix(d.nv, d.nh, d.nt).cast<Cx>();
  auto const dx = temporal_diff(x);
  oracle::Vector const got = Eigen::Map<oracle::Vector const>(dx.data(), dx.size());
  CHECK(oracle::rel_err(got, D * oracle::to_vector(x)) < 1e-14);

  auto const v = oracle::random_field<CoefficientTag>(d.nv, d.nh, d.nt - 1, rng);
  oracle::Vector const vv = Eigen::Map<oracle::Vector const>(v.data(), v.size());
  CHECK(oracle::rel_err(oracle::to_vector(temporal_diff_adjoint(v)), D.adjoint() * vv) < 1e-14);
}

TEST_CASE("TV normal solve")
{
  SUBCASE("two frames by hand")
  {
    auto const z = solve_tv_normal(1.0, series({1.0, 0.0}));
    CHECK(close(z(0, 0, 0), 2.0 / 3.0));
    CHECK(close(z(0, 0, 1), 1.0 / 3.0));
  }
  SUBCASE("constants pass through scaled by 1/c")
  {
    auto const z = solve_tv_normal(0.5, series({3.0, 3.0, 3.0, 3.0}));
    for (Index t = 0; t < 4; ++t) { CHECK(close(z(0, 0, t), 6.0, 1e-13)); }
  }
  SUBCASE("single frame")
  {
    auto const z = solve_tv_normal(2.0, series({Cx{1.0, 1.0}}));
    CHECK(close(z(0, 0, 0), Cx{0.5, 0.5}));
  }
  SUBCASE("dense comparison")
  {
    std::mt19937_64 rng(7);
    Dims const d{2, 3, 6, 1};
    auto const b = oracle::random_image(d, rng);
    Eigen::MatrixXd const D = oracle::difference_matrix(d.nv, d.nh, d.nt);
    Eigen::MatrixXd const A = 0.5 * Eigen::MatrixXd::Identity(D.cols(), D.cols()) + D.transpose() * D;
    oracle::Vector const ref = A.cast<Cx>().fullPivLu().solve(oracle::to_vector(b));
    CHECK(oracle::rel_err(oracle::to_vector(solve_tv_normal(0.5, b)), ref) < 1e-12);
  }
  CHECK_THROWS_AS(solve_tv_normal(0.0, series({1.0, 2.0})), Error);
}

TEST_CASE("temporal DFT")
{
  auto const w = temporal_dft_forward(series({1.0, 1.0}));
  CHECK(close(w(0, 0, 0), std::sqrt(2.0)));
  CHECK(close(w(0, 0, 1), 0.0));

  std::mt19937_64 rng(11);
  Dims const d{3, 2, 7, 1};
  auto const x = oracle::random_image(d, rng);
  auto const fx = temporal_dft_forward(x);
  CHECK(oracle::rel_err(temporal_dft_adjoint(fx), x) < 1e-13);
  CHECK(std::abs(norm2(fx) - norm2(x)) < 1e-13 * norm2(x));

  oracle::Vector const got = Eigen::Map<oracle::Vector const>(fx.data(), fx.size());
  CHECK(oracle::rel_err(got, oracle::temporal_dft_matrix(d.nv, d.nh, d.nt) * oracle::to_vector(x)) < 1e-13);

  auto const a = oracle::random_field<CoefficientTag>(d.nv, d.nh, d.nt, rng);
  CHECK(norm2(frame_complement(RegularizerKind::TemporalDFT, a)) < 1e-13 * norm2(a));
}

TEST_CASE("kind dispatch")
{
  CHECK(parse_regularizer("tdft") == RegularizerKind::TemporalDFT);
  CHECK(parse_regularizer("ttv") == RegularizerKind::TemporalTV);
  CHECK_THROWS_AS(parse_regularizer("wavelet"), Error);
  CHECK(to_string(RegularizerKind::TemporalTV) == "ttv");
  CHECK(is_tight_frame(RegularizerKind::TemporalDFT));
  CHECK_FALSE(is_tight_frame(RegularizerKind::TemporalTV));

  std::mt19937_64 rng(13);
  Dims const d{2, 2, 4, 1};
  auto const b = oracle::random_image(d, rng);
  for (auto k : {RegularizerKind::TemporalDFT, RegularizerKind::TemporalTV}) {
    auto const z = solve_regularizer_normal(k, 0.7, b);
    auto const back = 0.7 * z + apply_regularizer_adjoint(k, apply_regularizer(k, z));
    CHECK(oracle::rel_err(back, b) < 1e-13);
  }
}
