#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaborboost/ebm.hpp"

namespace gaborboost {

struct RankedTerm {
  std::string name;
  double importance = 0.0;
};

// Step function of one feature as a table: bin b covers values between
// cuts[b-2] and cuts[b-1] (open ends at the extremes); bin 0 is missing.
struct ShapeTable {
  std::string feature;
  std::size_t feature_index = 0;
  std::vector<double> cuts;
  std::vector<double> scores;
  double importance = 0.0;
};

struct PairGrid {
  std::string first;
  std::string second;
  std::size_t first_index = 0;
  std::size_t second_index = 0;
  std::vector<double> first_cuts;
  std::vector<double> second_cuts;
  std::vector<std::vector<double>> scores;  // [first bin][second bin]
  double importance = 0.0;
};

struct ClassExplanation {
  std::string class_name;
  double intercept = 0.0;
  // Main effects with non-zero importance, most important first.
  std::vector<RankedTerm> feature_ranking;
  // Every non-zero term including pairs ("a x b").
  std::vector<RankedTerm> term_ranking;
  std::vector<ShapeTable> shapes;
  std::vector<PairGrid> pairs;

  // 0-based position in feature_ranking, or feature_ranking.size() if absent.
  std::size_t rank_of(const std::string& feature) const;
  // Logit rebuilt from the tables alone.
  double logit(std::span<const double> row) const;
};

struct Explanation {
  std::vector<std::string> feature_names;
  std::vector<ClassExplanation> classes;

  const ClassExplanation& for_class(const std::string& name) const;
};

Explanation explain_global(const EbmModel& model, const std::string& class_name = "positive");
Explanation explain_global(const OvrEnsemble& ens);

nlohmann::json explanation_to_json(const Explanation& e);
Explanation explanation_from_json(const nlohmann::json& j);
void save_explanation(const Explanation& e, const std::filesystem::path& path);
Explanation load_explanation(const std::filesystem::path& path);

// Importance bar chart per class plus one heatmap per pair.
// Returns the files written.
std::vector<std::filesystem::path> write_svgs(const Explanation& e, const std::filesystem::path& dir);

}  // namespace gaborboost
