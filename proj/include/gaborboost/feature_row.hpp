#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaborboost {

// Parameters of the skewed inverted Mexican-hat profile fit.
struct PfParams {
  double amp = 0.0;
  double center = 0.0;
  double width = 1.0;
  double skew = 0.0;
  double offset = 0.0;

  bool operator==(const PfParams&) const = default;
};

// One image's tabular record.
// x_star / y_star are the response-maximum column and row divided by the
// image width and height, so tables from differently sized images share a
// scale. Quadrants follow image orientation: top = smaller row index,
// left = smaller column index.
struct FeatureRow {
  std::string id;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double lambda = 0.0;
  double x_star = 0.0;
  double y_star = 0.0;
  double q_tl = 0.0;
  double q_tr = 0.0;
  double q_bl = 0.0;
  double q_br = 0.0;
  double egf_tl_bl = 0.0;
  double egf_tr_br = 0.0;
  double egf_tl_tr = 0.0;
  double egf_bl_br = 0.0;
  // Present when physics fits were requested; all-NaN when the fit failed.
  std::optional<PfParams> pf;
  std::string label;

  // In-memory only; not part of the table format.
  bool degenerate_roi = false;

  bool pf_failed() const;
};

// Column names in table order. PF columns are included only when with_pf.
std::vector<std::string> feature_table_columns(bool with_pf);

// Numeric value of a named feature column ("sigma_x", "q_tl", "pf_amp", ...).
// Throws ConfigError for unknown names or PF columns on rows without PF.
double feature_value(const FeatureRow& row, std::string_view column);

}  // namespace gaborboost
