#include "gaborboost/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "gaborboost/errors.hpp"
#include "gaborboost/parallel.hpp"

namespace gaborboost {

namespace {

const std::vector<std::string> kGf = {"sigma_x", "sigma_y", "lambda", "x_star", "y_star",
                                      "q_tl",    "q_tr",    "q_bl",   "q_br"};
const std::vector<std::string> kEgf = {"egf_tl_bl", "egf_tr_br", "egf_tl_tr", "egf_bl_br"};
const std::vector<std::string> kPf = {"pf_amp", "pf_center", "pf_width", "pf_skew", "pf_offset"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) throw ConfigError("unknown class label '" + label + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

}  // namespace

FeatureSet parse_feature_set(std::string_view text) {
  const std::string t = upper(text);
  if (t == "GF") return FeatureSet::GF;
  if (t == "GF+EGF") return FeatureSet::GF_EGF;
  if (t == "GF+PF") return FeatureSet::GF_PF;
  if (t == "GF+EGF+PF") return FeatureSet::GF_EGF_PF;
  if (t == "PF") return FeatureSet::PF;
  throw ConfigError("unknown feature set '" + std::string(text) + "' (expected GF, GF+EGF, GF+PF, GF+EGF+PF or PF)");
}

std::string to_string(FeatureSet set) {
  switch (set) {
    case FeatureSet::GF: return "GF";
    case FeatureSet::GF_EGF: return "GF+EGF";
    case FeatureSet::GF_PF: return "GF+PF";
    case FeatureSet::GF_EGF_PF: return "GF+EGF+PF";
    case FeatureSet::PF: return "PF";
  }
  return "?";
}

bool uses_pf(FeatureSet set) { return set != FeatureSet::GF && set != FeatureSet::GF_EGF; }

std::vector<std::string> feature_columns(FeatureSet set) {
  std::vector<std::string> cols;
  if (set != FeatureSet::PF) cols = kGf;
  if (set == FeatureSet::GF_EGF || set == FeatureSet::GF_EGF_PF) cols.insert(cols.end(), kEgf.begin(), kEgf.end());
  if (uses_pf(set)) cols.insert(cols.end(), kPf.begin(), kPf.end());
  return cols;
}

SelectedTable select_columns(const std::vector<FeatureRow>& rows, const std::vector<std::string>& columns) {
  const bool needs_pf =
      std::any_of(columns.begin(), columns.end(), [](const std::string& c) { return c.rfind("pf_", 0) == 0; });
  SelectedTable out;
  out.matrix.names = columns;
  for (const auto& row : rows) {
    if (needs_pf) {
      if (!row.pf) throw ConfigError("feature table has no physics-fit columns (tabularize with --with-pf)");
      if (row.pf_failed()) {
        ++out.excluded_pf_failures;
        continue;
      }
    }
    for (const auto& c : columns) out.matrix.values.push_back(feature_value(row, c));
    out.labels.push_back(row.label);
    out.ids.push_back(row.id);
    ++out.matrix.rows;
  }
  return out;
}

SelectedTable select_features(const std::vector<FeatureRow>& rows, FeatureSet set) {
  return select_columns(rows, feature_columns(set));
}

FoldSplit stratified_kfold(std::span<const std::string> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be at least 2");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.fold_of.assign(labels.size(), 0);
  split.folds.assign(k, {});
  std::mt19937_64 rng(seed);
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw ConfigError("stratified_kfold: class '" + label + "' has " + std::to_string(members.size()) +
                        " members, fewer than k = " + std::to_string(k));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t idx : members) {
      split.fold_of[idx] = next;
      split.folds[next].push_back(idx);
      next = (next + 1) % k;
    }
  }
  for (auto& f : split.folds) std::sort(f.begin(), f.end());
  return split;
}

Metrics compute_metrics(const Confusion& m) {
  const std::size_t n = m.size();
  for (const auto& row : m) {
    if (row.size() != n) throw ConfigError("compute_metrics: confusion matrix must be square");
  }
  Metrics out;
  out.precision.assign(n, 0.0);
  out.recall.assign(n, 0.0);
  out.precision_undefined.assign(n, false);
  out.recall_undefined.assign(n, false);
  std::size_t total = 0, trace = 0;
  std::vector<std::size_t> row_sum(n, 0), col_sum(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      total += m[r][c];
      row_sum[r] += m[r][c];
      col_sum[c] += m[r][c];
    }
    trace += m[r][r];
  }
  out.accuracy = total ? 100.0 * static_cast<double>(trace) / static_cast<double>(total) : 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (col_sum[c]) {
      out.precision[c] = 100.0 * static_cast<double>(m[c][c]) / static_cast<double>(col_sum[c]);
    } else {
      out.precision_undefined[c] = true;
    }
    if (row_sum[c]) {
      out.recall[c] = 100.0 * static_cast<double>(m[c][c]) / static_cast<double>(row_sum[c]);
    } else {
      out.recall_undefined[c] = true;
    }
  }
  return out;
}

std::string format_mean_sigma(double mean, double sigma) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f(%.0f)", mean, std::round(std::abs(sigma) * 10.0));
  return buf;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) {
    s.text = format_mean_sigma(0.0, 0.0);
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sigma = std::sqrt(ss / static_cast<double>(values.size()));
  s.text = format_mean_sigma(s.mean, s.sigma);
  return s;
}

Confusion evaluate(const OvrEnsemble& ens, const SelectedTable& data) {
  if (!ens.models.empty() && ens.models.front().feature_names != data.matrix.names) {
    throw ConfigError("evaluate: table columns do not match the model's features");
  }
  Confusion m(ens.classes.size(), std::vector<std::size_t>(ens.classes.size(), 0));
  for (std::size_t i = 0; i < data.matrix.rows; ++i) {
    const std::size_t truth = class_index(ens.classes, data.labels[i]);
    ++m[truth][ens.predict(data.matrix.row(i)).class_index];
  }
  return m;
}

CvReport run_cv(const std::vector<FeatureRow>& table, const CvConfig& config) {
  if (config.repeats < 1) throw ConfigError("run_cv: repeats must be at least 1");
  const SelectedTable data = select_features(table, config.feature_set);

  CvReport report;
  report.config = config;
  report.rows = data.matrix.rows;
  report.excluded_pf_failures = data.excluded_pf_failures;
  report.classes = data.labels;
  std::sort(report.classes.begin(), report.classes.end());
  report.classes.erase(std::unique(report.classes.begin(), report.classes.end()), report.classes.end());
  if (report.classes.size() < 2) throw ConfigError("run_cv: need at least two classes");

  std::vector<FoldSplit> splits;
  for (std::size_t r = 0; r < config.repeats; ++r) splits.push_back(stratified_kfold(data.labels, config.k, config.seed + r));

  report.cells.resize(config.repeats * config.k);
  parallel_for(report.cells.size(), [&](std::size_t cell_index) {
    const std::size_t r = cell_index / config.k, f = cell_index % config.k;
    const auto& split = splits[r];
    SelectedTable train, test;
    train.matrix.names = test.matrix.names = data.matrix.names;
    for (std::size_t i = 0; i < data.matrix.rows; ++i) {
      SelectedTable& dst = split.fold_of[i] == f ? test : train;
      const auto row = data.matrix.row(i);
      dst.matrix.values.insert(dst.matrix.values.end(), row.begin(), row.end());
      dst.labels.push_back(data.labels[i]);
      ++dst.matrix.rows;
    }
    const OvrEnsemble ens = train_ovr(train.matrix, train.labels, config.ebm);
    if (ens.classes != report.classes) throw TrainingError("run_cv: a training fold is missing a class");
    CvCell& cell = report.cells[cell_index];
    cell.repeat = r;
    cell.fold = f;
    cell.confusion = evaluate(ens, test);
    cell.metrics = compute_metrics(cell.confusion);
  });

  std::vector<double> acc;
  for (const auto& c : report.cells) acc.push_back(c.metrics.accuracy);
  report.accuracy = summarize(acc);
  for (std::size_t k = 0; k < report.classes.size(); ++k) {
    std::vector<double> p, q;
    for (const auto& c : report.cells) {
      p.push_back(c.metrics.precision[k]);
      q.push_back(c.metrics.recall[k]);
    }
    report.precision.push_back(summarize(p));
    report.recall.push_back(summarize(q));
  }
  return report;
}

nlohmann::json config_to_json(const CvConfig& config) {
  const auto& e = config.ebm;
  return {{"feature_set", to_string(config.feature_set)},
          {"repeats", config.repeats},
          {"k", config.k},
          {"seed", config.seed},
          {"ebm",
           {{"learning_rate", e.learning_rate},
            {"max_rounds", e.max_rounds},
            {"patience", e.patience},
            {"val_fraction", e.val_fraction},
            {"max_pairs", e.max_pairs},
            {"max_bins", e.max_bins},
            {"max_pair_bins", e.max_pair_bins},
            {"max_leaves", e.max_leaves},
            {"seed", e.seed},
            {"balance_classes", e.balance_classes}}}};
}

nlohmann::json CvReport::to_json() const {
  using nlohmann::json;
  auto summary = [](const Summary& s) { return json{{"mean", s.mean}, {"sigma", s.sigma}, {"text", s.text}}; };
  json j;
  j["format"] = "gaborboost-cv-report";
  j["version"] = 1;
  j["config"] = config_to_json(config);
  j["classes"] = classes;
  j["rows"] = rows;
  j["excluded_pf_failures"] = excluded_pf_failures;
  j["accuracy"] = summary(accuracy);
  j["precision"] = json::object();
  j["recall"] = json::object();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    j["precision"][classes[c]] = summary(precision[c]);
    j["recall"][classes[c]] = summary(recall[c]);
  }
  j["cells"] = json::array();
  for (const auto& cell : cells) {
    j["cells"].push_back({{"repeat", cell.repeat},
                          {"fold", cell.fold},
                          {"confusion", cell.confusion},
                          {"accuracy", cell.metrics.accuracy},
                          {"precision", cell.metrics.precision},
                          {"recall", cell.metrics.recall},
                          {"precision_undefined", cell.metrics.precision_undefined},
                          {"recall_undefined", cell.metrics.recall_undefined}});
  }
  return j;
}

std::string CvReport::to_text() const {
  std::ostringstream out;
  const std::string method = to_string(config.feature_set) + "+EBM";
  out << config.repeats << " x " << config.k << "-fold stratified CV, " << rows << " rows";
  if (excluded_pf_failures) out << " (" << excluded_pf_failures << " excluded: physics fit failed)";
  out << "\n\n";
  std::vector<std::string> header{"Method", "Accuracy"};
  for (const auto& c : classes) header.push_back("P(" + c + ")");
  for (const auto& c : classes) header.push_back("R(" + c + ")");
  std::vector<std::string> values{method, accuracy.text};
  for (const auto& s : precision) values.push_back(s.text);
  for (const auto& s : recall) values.push_back(s.text);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::size_t w = std::max(header[i].size(), values[i].size()) + 2;
    header[i].resize(w, ' ');
    values[i].resize(w, ' ');
  }
  for (const auto& h : header) out << h;
  out << "\n";
  for (const auto& v : values) out << v;
  out << "\n";
  return out.str();
}

}  // namespace gaborboost
