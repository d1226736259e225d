#include "csmri/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "csmri/parallel.hpp"
#include "csmri/transfer_operator.hpp"

namespace csmri {

namespace {

constexpr double pi = std::numbers::pi;

auto splitmix64(std::uint64_t x) -> std::uint64_t
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

auto uniform(std::mt19937_64 &rng, double lo, double hi) -> double
{
  return lo + (hi - lo) * std::generate_canonical<double, 64>(rng);
}

// Streams used by the generators.
enum : std::uint64_t
{
  phantom_stream = 0x1000,
  coil_stream = 0x2000,
  mask_stream = 0x3000,
  noise_stream = 0x4000,
};

auto inside_ellipse(double x, double y, double cx, double cy, double rx, double ry) -> bool
{
  double const dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

} // namespace

auto substream_seed(std::uint64_t seed, std::uint64_t stream) -> std::uint64_t
{
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

auto MaskSpec::kept_per_frame() const -> Index
{
  return static_cast<Index>(std::ceil(double(nv) / accel));
}

void MaskSpec::validate() const
{
  if (nv < 1 || nt < 1) { throw Error(fmt::format("mask extents must be positive (nv={}, nt={})", nv, nt)); }
  if (!(accel >= 1.0) || !std::isfinite(accel)) { throw Error(fmt::format("acceleration must be >= 1 (got {})", accel)); }
  if (n_center < 0) { throw Error("center line count must be >= 0"); }
  Index const kept = kept_per_frame();
  if (kept > nv) { throw Error(fmt::format("mask infeasible: {} kept lines exceed nv={}", kept, nv)); }
  if (n_center > kept) {
    throw Error(fmt::format("mask infeasible: {} center lines exceed the {} kept lines per frame", n_center, kept));
  }
}

auto generate_phantom(PhantomSpec const &spec) -> ImageSequence
{
  spec.dims.validate();
  if (spec.motion_period < 1) { throw Error("motion period must be >= 1"); }
  if (!(spec.noise_sigma >= 0.0)) { throw Error("noise sigma must be >= 0"); }

  std::mt19937_64 rng(substream_seed(spec.seed, phantom_stream));
  double const torso_cx = uniform(rng, -0.05, 0.05), torso_cy = uniform(rng, -0.05, 0.05);
  double const torso_rx = uniform(rng, 0.78, 0.86), torso_ry = uniform(rng, 0.62, 0.70);
  double const heart_cx = uniform(rng, 0.05, 0.15), heart_cy = uniform(rng, -0.15, -0.05);
  double const heart_r = uniform(rng, 0.22, 0.28);
  double const pulse = uniform(rng, 0.15, 0.25);
  double const blob_cx = uniform(rng, -0.45, -0.35), blob_cy = uniform(rng, 0.2, 0.3);
  double const blob_r = uniform(rng, 0.08, 0.12), blob_travel = uniform(rng, 0.1, 0.2);
  double const ramp_h = uniform(rng, -0.8, 0.8), ramp_v = uniform(rng, -0.8, 0.8);
  double const phase0 = uniform(rng, -pi, pi);

  Dims const d = spec.dims;
  ImageSequence x(d);
  parallel::for_each(d.nt, [&](Index t) {
    // The phase depends on t mod period only, so periodicity is exact.
    double const cycle = 2.0 * pi * double(t % spec.motion_period) / double(spec.motion_period);
    double const scale = 1.0 + pulse * std::cos(cycle);
    double const shift = blob_travel * std::sin(cycle);
    for (Index h = 0; h < d.nh; ++h) {
      double const px = (double(h) + 0.5) / double(d.nh) * 2.0 - 1.0;
      for (Index v = 0; v < d.nv; ++v) {
        double const py = (double(v) + 0.5) / double(d.nv) * 2.0 - 1.0;
        double mag = 0.0;
        if (inside_ellipse(px, py, torso_cx, torso_cy, torso_rx, torso_ry)) {
          mag = 0.35 + 0.1 * std::cos(0.5 * pi * px) * std::cos(0.5 * pi * py);
          if (inside_ellipse(px, py, heart_cx, heart_cy, heart_r * scale, 0.85 * heart_r * scale)) { mag = 1.0; }
          if (inside_ellipse(px, py, blob_cx + shift, blob_cy, blob_r, blob_r)) { mag = 0.7; }
        }
        x(v, h, t) = std::polar(mag, phase0 + pi * (ramp_h * px + ramp_v * py));
      }
    }
  });

  double peak = 0.0;
  for (Index i = 0; i < x.size(); ++i) { peak = std::max(peak, std::abs(x[i])); }
  if (peak > 0.0) { x *= Cx{1.0 / peak}; }
  return x;
}

auto generate_sensitivities(Dims const &dims, std::uint64_t seed) -> CoilSensitivities
{
  dims.validate();
  Index const nc = dims.nc;
  CoilSensitivities s(dims.nv, dims.nh, nc);
  for (Index c = 0; c < nc; ++c) {
    std::mt19937_64 rng(substream_seed(seed, coil_stream + std::uint64_t(c)));
    double const angle = 2.0 * pi * double(c) / double(nc) + uniform(rng, -0.1, 0.1);
    double const cx = 1.1 * std::cos(angle), cy = 1.1 * std::sin(angle);
    double const width = uniform(rng, 0.7, 0.9);
    double const phase0 = uniform(rng, -pi, pi);
    double const twist = uniform(rng, 0.3, 0.6);
    for (Index h = 0; h < dims.nh; ++h) {
      double const px = (double(h) + 0.5) / double(dims.nh) * 2.0 - 1.0;
      for (Index v = 0; v < dims.nv; ++v) {
        double const py = (double(v) + 0.5) / double(dims.nv) * 2.0 - 1.0;
        double const r2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        double const mag = std::exp(-r2 / (2.0 * width * width));
        double const phase = phase0 + twist * pi * (px * std::cos(angle) + py * std::sin(angle));
        s(v, h, c) = std::polar(mag, phase);
      }
    }
  }
  for (Index h = 0; h < dims.nh; ++h) {
    for (Index v = 0; v < dims.nv; ++v) {
      double energy = 0.0;
      for (Index c = 0; c < nc; ++c) { energy += std::norm(s(v, h, c)); }
      double const inv = 1.0 / std::sqrt(energy);
      for (Index c = 0; c < nc; ++c) { s(v, h, c) *= inv; }
    }
  }
  return s;
}

auto generate_mask(MaskSpec const &spec) -> SamplingMask
{
  spec.validate();
  Index const nv = spec.nv;
  Index const kept = spec.kept_per_frame();
  auto distance = [nv](Index f) { return std::min(f, nv - f); };

  std::vector<Index> by_distance(static_cast<size_t>(nv));
  for (Index f = 0; f < nv; ++f) { by_distance[f] = f; }
  std::stable_sort(by_distance.begin(), by_distance.end(), [&](Index a, Index b) { return distance(a) < distance(b); });

  SamplingMask mask(nv, spec.nt);
  for (Index t = 0; t < spec.nt; ++t) {
    std::mt19937_64 rng(substream_seed(spec.seed, mask_stream + std::uint64_t(t)));
    std::vector<double> weight(static_cast<size_t>(nv));
    for (Index f = 0; f < nv; ++f) { weight[f] = 1.0 / (1.0 + double(distance(f))); }
    for (Index j = 0; j < spec.n_center; ++j) {
      mask.set(by_distance[j], t, true);
      weight[by_distance[j]] = 0.0;
    }
    for (Index n = spec.n_center; n < kept; ++n) {
      double total = 0.0;
      for (double w : weight) { total += w; }
      double const u = std::generate_canonical<double, 64>(rng) * total;
      double acc = 0.0;
      Index pick = -1;
      for (Index f = 0; f < nv; ++f) {
        if (weight[f] == 0.0) { continue; }
        pick = f;
        acc += weight[f];
        if (u < acc) { break; }
      }
      mask.set(pick, t, true);
      weight[pick] = 0.0;
    }
  }
  return mask;
}

auto simulate_acquisition(ImageSequence const &x,
                          CoilSensitivities const &sens,
                          SamplingMask const &mask,
                          double noise_sigma,
                          std::uint64_t seed) -> KSpaceData
{
  if (!(noise_sigma >= 0.0)) { throw Error(fmt::format("noise sigma must be >= 0 (got {})", noise_sigma)); }
  TransferOperator const op(sens, mask);
  KSpaceData y = op.forward(x);
  if (noise_sigma == 0.0) { return y; }
  Dims const d = y.dims();
  double const part_sigma = noise_sigma / std::sqrt(2.0);
  parallel::for_each(d.nc * d.nt, [&](Index tc) {
    Index const c = tc % d.nc, t = tc / d.nc;
    std::mt19937_64 rng(substream_seed(seed, noise_stream + std::uint64_t(tc)));
    std::normal_distribution<double> normal(0.0, part_sigma);
    for (Index h = 0; h < d.nh; ++h) {
      for (Index v = 0; v < d.nv; ++v) {
        if (!mask.kept(v, t)) { continue; }
        double const re = normal(rng);
        double const im = normal(rng);
        y(v, h, c, t) += Cx{re, im};
      }
    }
  });
  return y;
}

auto desk_preset(std::uint64_t seed) -> ProblemSpec
{
  ProblemSpec p;
  p.phantom = PhantomSpec{Dims{32, 32, 8, 4}, 8, 0.01, seed};
  p.mask = MaskSpec{32, 8, 4.0, 4, seed};
  return p;
}

auto paper_scale_preset(std::uint64_t seed) -> ProblemSpec
{
  ProblemSpec p;
  p.phantom = PhantomSpec{Dims{128, 128, 22, 8}, 11, 0.01, seed};
  p.mask = MaskSpec{128, 22, 8.0, 4, seed};
  return p;
}

auto simulate_problem(ProblemSpec const &spec) -> SyntheticProblem
{
  SyntheticProblem p;
  p.truth = generate_phantom(spec.phantom);
  p.sens = generate_sensitivities(spec.phantom.dims, spec.phantom.seed);
  p.mask = generate_mask(spec.mask);
  p.data = simulate_acquisition(p.truth, p.sens, p.mask, spec.phantom.noise_sigma, spec.phantom.seed);
  return p;
}

} // namespace csmri
