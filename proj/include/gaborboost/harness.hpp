#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gaborboost/ebm.hpp"
#include "gaborboost/feature_row.hpp"

namespace gaborboost {

enum class FeatureSet { GF, GF_EGF, GF_PF, GF_EGF_PF, PF };

// "GF", "GF+EGF", "GF+PF", "GF+EGF+PF", "PF" (case-insensitive).
FeatureSet parse_feature_set(std::string_view text);
std::string to_string(FeatureSet set);
std::vector<std::string> feature_columns(FeatureSet set);
bool uses_pf(FeatureSet set);

struct SelectedTable {
  FeatureMatrix matrix;
  std::vector<std::string> labels;
  std::vector<std::string> ids;
  // Rows dropped because their physics fit failed.
  std::size_t excluded_pf_failures = 0;
};

// Pulls the named columns out of a feature table. Rows whose physics fit
// failed are dropped when any pf_* column is requested.
SelectedTable select_columns(const std::vector<FeatureRow>& rows, const std::vector<std::string>& columns);
SelectedTable select_features(const std::vector<FeatureRow>& rows, FeatureSet set);

struct FoldSplit {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;                // per input index
  std::vector<std::vector<std::size_t>> folds;     // ascending indices
};

// Seeded shuffle within each class (classes in sorted order), then
// round-robin fold assignment continuing across classes. Throws
// ConfigError when k < 2 or a class has fewer than k members.
FoldSplit stratified_kfold(std::span<const std::string> labels, std::size_t k, std::uint64_t seed);

using Confusion = std::vector<std::vector<std::size_t>>;  // [true][predicted]

// Percentages. A 0/0 precision or recall is reported as 0 and flagged.
struct Metrics {
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<bool> precision_undefined;
  std::vector<bool> recall_undefined;
};

Metrics compute_metrics(const Confusion& m);

// Mean to one decimal with sigma in units of the last digit, e.g.
// "87.4(4)", "100.0(0)", "80.2(13)".
std::string format_mean_sigma(double mean, double sigma);

struct Summary {
  double mean = 0.0;
  double sigma = 0.0;  // population standard deviation over cells
  std::string text;
};

Summary summarize(std::span<const double> values);

struct CvConfig {
  FeatureSet feature_set = FeatureSet::GF_EGF;
  std::size_t repeats = 5;
  std::size_t k = 6;
  std::uint64_t seed = 0;
  EbmConfig ebm;
};

struct CvCell {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  Confusion confusion;
  Metrics metrics;
};

struct CvReport {
  CvConfig config;
  std::vector<std::string> classes;
  std::size_t rows = 0;
  std::size_t excluded_pf_failures = 0;
  std::vector<CvCell> cells;  // repeat-major, then fold
  Summary accuracy;
  std::vector<Summary> precision;
  std::vector<Summary> recall;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Repeat r uses fold seed config.seed + r. Cells are independent and run
// in parallel; the report does not depend on the thread count.
CvReport run_cv(const std::vector<FeatureRow>& table, const CvConfig& config);

// Confusion matrix of an ensemble on a selected table; labels outside
// the ensemble's classes are an error.
Confusion evaluate(const OvrEnsemble& ens, const SelectedTable& data);

nlohmann::json config_to_json(const CvConfig& config);

}  // namespace gaborboost
