#include "gaborboost/feature_row.hpp"

#include <cmath>

#include "gaborboost/errors.hpp"

namespace gaborboost {

bool FeatureRow::pf_failed() const {
  return pf.has_value() && (std::isnan(pf->amp) || std::isnan(pf->center) || std::isnan(pf->width) ||
                            std::isnan(pf->skew) || std::isnan(pf->offset));
}

std::vector<std::string> feature_table_columns(bool with_pf) {
  std::vector<std::string> cols = {"id",   "sigma_x", "sigma_y", "lambda",    "x_star",    "y_star",
                                   "q_tl", "q_tr",    "q_bl",    "q_br",      "egf_tl_bl", "egf_tr_br",
                                   "egf_tl_tr", "egf_bl_br"};
  if (with_pf) {
    for (const char* c : {"pf_amp", "pf_center", "pf_width", "pf_skew", "pf_offset"}) cols.emplace_back(c);
  }
  cols.emplace_back("label");
  return cols;
}

double feature_value(const FeatureRow& row, std::string_view column) {
  if (column == "sigma_x") return row.sigma_x;
  if (column == "sigma_y") return row.sigma_y;
  if (column == "lambda") return row.lambda;
  if (column == "x_star") return row.x_star;
  if (column == "y_star") return row.y_star;
  if (column == "q_tl") return row.q_tl;
  if (column == "q_tr") return row.q_tr;
  if (column == "q_bl") return row.q_bl;
  if (column == "q_br") return row.q_br;
  if (column == "egf_tl_bl") return row.egf_tl_bl;
  if (column == "egf_tr_br") return row.egf_tr_br;
  if (column == "egf_tl_tr") return row.egf_tl_tr;
  if (column == "egf_bl_br") return row.egf_bl_br;
  if (column.starts_with("pf_")) {
    if (!row.pf) throw ConfigError("row '" + row.id + "' has no PF columns");
    if (column == "pf_amp") return row.pf->amp;
    if (column == "pf_center") return row.pf->center;
    if (column == "pf_width") return row.pf->width;
    if (column == "pf_skew") return row.pf->skew;
    if (column == "pf_offset") return row.pf->offset;
  }
  throw ConfigError("unknown feature column '" + std::string(column) + "'");
}

}  // namespace gaborboost
