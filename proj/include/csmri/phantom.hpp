#pragma once

#include <cstdint>

#include "types.hpp"

namespace csmri {

struct PhantomSpec
{
  Dims dims{32, 32, 8, 4};
  Index motion_period = 8; // frames per pulsation cycle
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;
};

struct MaskSpec
{
  Index nv = 32;
  Index nt = 8;
  double accel = 4.0;
  Index n_center = 4; // lines nearest DC, always kept
  std::uint64_t seed = 1;

  auto kept_per_frame() const -> Index;
  void validate() const;
};

/*
 * Dynamic cardiac-like sequence: a static elliptical torso, a pulsating
 * ellipse and a small blob translating back and forth, both periodic in
 * motion_period frames, under a smooth spatial phase ramp. Max magnitude is 1.
 */
auto generate_phantom(PhantomSpec const &spec) -> ImageSequence;

// Gaussian coil profiles around the field of view, normalized so that
// sum_c |s_c|^2 = 1 at every pixel.
auto generate_sensitivities(Dims const &dims, std::uint64_t seed) -> CoilSensitivities;

/*
 * Variable-density Cartesian line mask. Per frame the n_center lines nearest
 * DC are kept and the rest of ceil(n_v / accel) lines are drawn without
 * replacement with probability proportional to 1 / (1 + |f|), |f| being the
 * circular distance from DC. Each frame draws from its own substream.
 */
auto generate_mask(MaskSpec const &spec) -> SamplingMask;

// y = H x + n, complex Gaussian n with E|n|^2 = sigma^2, on sampled rows only.
auto simulate_acquisition(ImageSequence const &x,
                          CoilSensitivities const &sens,
                          SamplingMask const &mask,
                          double noise_sigma,
                          std::uint64_t seed) -> KSpaceData;

// 64-bit generator seeded from (seed, stream); streams are independent.
auto substream_seed(std::uint64_t seed, std::uint64_t stream) -> std::uint64_t;

struct ProblemSpec
{
  PhantomSpec phantom;
  MaskSpec mask;
};

struct SyntheticProblem
{
  ImageSequence truth;
  CoilSensitivities sens;
  SamplingMask mask;
  KSpaceData data;
};

// 32x32x8, 4 coils, accel 4, sigma 0.01.
auto desk_preset(std::uint64_t seed = 1) -> ProblemSpec;
// 128x128x22, 8 coils, accel 8, sigma 0.01.
auto paper_scale_preset(std::uint64_t seed = 1) -> ProblemSpec;
auto simulate_problem(ProblemSpec const &spec) -> SyntheticProblem;

} // namespace csmri
