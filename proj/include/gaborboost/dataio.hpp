#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gaborboost/feature_row.hpp"
#include "gaborboost/image.hpp"

namespace gaborboost {

enum class ImageFormat { Pgm, Csv };

// Picks the format from a ".pgm" or ".csv" extension (case-insensitive).
ImageFormat format_from_path(const std::filesystem::path& path);

// Loads an image and rescales intensities into [0, 1]: PGM by its maxval,
// CSV by the largest absolute value. Throws ParseError naming the file and
// line on malformed input.
GrayImage load_image(const std::filesystem::path& path, ImageFormat format);
GrayImage load_image(const std::filesystem::path& path);

// Writes a binary (P5) PGM, clamping intensities to [0, 1] before
// quantizing to maxval (255 or 65535).
void write_pgm(const GrayImage& img, const std::filesystem::path& path, int maxval = 65535);

struct LabeledDataset {
  std::vector<GrayImage> images;
  std::vector<std::string> labels;
  std::vector<std::string> names;

  std::size_t size() const { return images.size(); }
  // Throws ConfigError when the three lists disagree in length, or when a
  // label falls outside `classes` (skipped if `classes` is empty).
  void validate(const std::set<std::string>& classes = {}) const;
};

// Reads `labels.csv` (header `filename,label`) from dir and loads each
// listed image. Records come back sorted by filename.
LabeledDataset load_dataset(const std::filesystem::path& dir);

// Writes every image as 16-bit PGM plus labels.csv. Names get a ".pgm"
// extension if they lack one.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir);

// Flips images whose original label is in flip_set, then relabels every
// record through merge_map. Throws ConfigError for a label missing from
// merge_map or a flip label outside its domain.
LabeledDataset reduce_classes(const LabeledDataset& ds,
                              const std::map<std::string, std::string>& merge_map,
                              const std::set<std::string>& flip_set);

// Feature-table CSV. All rows must agree on whether PF columns are present.
void write_feature_table(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_feature_table(const std::filesystem::path& path);

}  // namespace gaborboost
