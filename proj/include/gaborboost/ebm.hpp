#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gaborboost {

// Dense row-major table of real features.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::size_t rows = 0;
  std::vector<double> values;

  std::size_t cols() const { return names.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }
};

// Cut points for one feature. Bin 0 holds missing (NaN) values; value bins
// are 1..cuts.size()+1 and anything beyond the outer cuts lands in the
// edge bins.
struct FeatureBins {
  std::vector<double> cuts;

  std::size_t n_bins() const { return cuts.size() + 2; }
  std::size_t bin(double v) const;
};

using BinMap = std::vector<FeatureBins>;

// Quantile cut points per column, placed midway between distinct sorted
// values. Columns with at most max_bins distinct values get one bin per
// value.
BinMap build_bins(const FeatureMatrix& table, std::size_t max_bins = 64);

struct EbmConfig {
  double learning_rate = 0.05;
  std::size_t max_rounds = 1000;
  std::size_t patience = 50;
  double val_fraction = 0.15;
  std::size_t max_pairs = 10;
  std::size_t max_bins = 64;
  // Contiguous bin segments per main-effect update; 0 updates every bin
  // on its own.
  std::size_t max_leaves = 3;
  // Pair terms use a coarser binning of the same features.
  std::size_t max_pair_bins = 16;
  std::uint64_t seed = 0;
  // Inverse-frequency sample weights in the loss.
  bool balance_classes = false;
};

struct ShapeFunction {
  std::size_t feature = 0;
  std::vector<double> scores;  // per bin of bins[feature]
};

struct PairFunction {
  std::size_t first = 0;
  std::size_t second = 0;
  // Row-major over (pair_bins[first], pair_bins[second]).
  std::vector<double> scores;
};

struct EbmModel {
  std::vector<std::string> feature_names;
  BinMap bins;
  BinMap pair_bins;
  double intercept = 0.0;
  std::vector<ShapeFunction> shapes;
  std::vector<PairFunction> pairs;
  // Mean |term contribution| over the training rows.
  std::vector<double> shape_importance;
  std::vector<double> pair_importance;

  // Training trace: validation log-loss after each round of each phase,
  // round 0 first. Not serialized.
  std::vector<double> validation_losses;
  std::size_t best_round = 0;

  double shape_score(std::size_t term, double value) const;
  double pair_score(std::size_t term, double first_value, double second_value) const;
  // intercept + every shape and pair lookup.
  double logit(std::span<const double> row) const;
  double predict(std::span<const double> row) const;
};

// Cyclic per-bin gradient boosting of main effects, then of the
// max_pairs pairs that best explain the remaining residual, each phase
// early-stopped on a stratified validation split. Labels are 0/1.
// The result does not depend on input row order. A single-class label
// vector yields an intercept-only model. Throws TrainingError for fewer
// than 20 rows, non-finite features or labels other than 0/1.
EbmModel train_binary(const FeatureMatrix& table, std::span<const int> labels, const EbmConfig& config = {});

// One binary model per class, class list sorted.
struct OvrEnsemble {
  std::vector<std::string> classes;
  std::vector<EbmModel> models;

  struct Prediction {
    std::size_t class_index = 0;
    std::vector<double> probabilities;
  };
  // argmax of per-class probabilities; ties go to the earliest class.
  Prediction predict(std::span<const double> row) const;
};

OvrEnsemble train_ovr(const FeatureMatrix& table, std::span<const std::string> labels, const EbmConfig& config = {});

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json model_to_json(const EbmModel& model);
EbmModel model_from_json(const nlohmann::json& j);
nlohmann::json ensemble_to_json(const OvrEnsemble& ens);
OvrEnsemble ensemble_from_json(const nlohmann::json& j);

void save_model(const EbmModel& model, const std::filesystem::path& path);
EbmModel load_model(const std::filesystem::path& path);
void save_ensemble(const OvrEnsemble& ens, const std::filesystem::path& path);
OvrEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace gaborboost
