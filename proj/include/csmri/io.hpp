#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "solvers.hpp"
#include "types.hpp"

namespace csmri::io {

/*
 * CSK1 container, little endian throughout:
 *   bytes 0-3   "CSK1"
 *   byte  4     kind (1 image, 2 k-space, 3 sensitivities, 4 mask)
 *   bytes 5-7   zero
 *   bytes 8-23  n_v, n_h, n_t, n_c as uint32 (unused extents are 1)
 *   payload     kinds 1-3: float32 (re, im) pairs, v fastest, then h, c, t
 *               kind 4: one byte (0/1) per (v, t), v fastest
 * A k-space file is followed by a complete kind-4 block holding its mask.
 * Values are stored as float32; reading widens them back to double.
 */
enum class DatasetKind : std::uint8_t
{
  Image = 1,
  KSpace = 2,
  Sensitivities = 3,
  Mask = 4,
};

inline constexpr std::size_t header_bytes = 24;

using Dataset = std::variant<ImageSequence, KSpaceData, CoilSensitivities, SamplingMask>;

void write_dataset(std::filesystem::path const &path, ImageSequence const &x);
void write_dataset(std::filesystem::path const &path, KSpaceData const &y);
void write_dataset(std::filesystem::path const &path, CoilSensitivities const &s);
void write_dataset(std::filesystem::path const &path, SamplingMask const &m);

// K-space files without an embedded mask need `mask`; if both exist they must agree.
auto read_dataset(std::filesystem::path const &path, std::optional<SamplingMask> const &mask = std::nullopt)
  -> Dataset;
auto read_image(std::filesystem::path const &path) -> ImageSequence;
auto read_sensitivities(std::filesystem::path const &path) -> CoilSensitivities;
auto read_mask(std::filesystem::path const &path) -> SamplingMask;
auto read_kspace(std::filesystem::path const &path, std::optional<SamplingMask> const &mask = std::nullopt)
  -> KSpaceData;

inline constexpr char const *trace_header = "iter,objective,delta,elapsed_ms";

/*
 * Trace CSV. Leading `# ...` comment lines carry run metadata, then the exact
 * header, then a row for iteration 0 (delta "nan") and one per logged
 * iteration. Numbers use 17 significant digits.
 */
void write_trace(std::filesystem::path const &path, SolverTrace const &trace, std::vector<std::string> const &comments = {});
auto read_trace(std::filesystem::path const &path) -> SolverTrace;

// frame_%03d.pgm, 16-bit binary graymap, one global scale with max -> 65535.
void export_frames(ImageSequence const &x, std::filesystem::path const &dir);

} // namespace csmri::io
