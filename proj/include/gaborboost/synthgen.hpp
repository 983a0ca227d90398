#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gaborboost/dataio.hpp"

namespace gaborboost {

inline constexpr const char* kLongitudinal = "longitudinal";
inline constexpr const char* kPartial = "partial";
inline constexpr const char* kVortex = "vortex";

struct SynthSpec {
  std::size_t width = 128;
  std::size_t height = 64;
  std::size_t longitudinal = 400;
  std::size_t partial = 150;
  std::size_t vortex = 50;
  double noise_sigma = 0.02;
  std::uint64_t seed = 7;

  // Throws ConfigError for zero dimensions or negative/non-finite noise.
  void validate() const;
};

// Per-image construction record.
struct GroundTruth {
  std::string name;
  std::string label;
  int dip_column = 0;
  int extent_top = 0;     // first row carrying the dip
  int extent_bottom = 0;  // last row carrying at least half the dip depth
  int asymmetry_sign = 0; // +1 when the bottom-right shoulder is the stronger bottom shoulder
};

struct SynthDataset {
  LabeledDataset data;
  std::vector<GroundTruth> truth;
};

// Condensate-like images: a clipped inverted-parabola cloud crossed by a
// vertical dip with bright shoulders.
//  - longitudinal: full-height symmetric dip;
//  - partial: dip depth switched off below a row near the vertical middle;
//  - vortex: full-height dip whose shoulder contrast flips between halves,
//    left shoulder stronger on top and right shoulder stronger below.
// Records are ordered longitudinal, partial, vortex; image i draws from
// its own generator seeded by (seed, i), so output is deterministic.
SynthDataset generate(const SynthSpec& spec);

void write_ground_truth(const std::vector<GroundTruth>& truth, const std::filesystem::path& path);

}  // namespace gaborboost
