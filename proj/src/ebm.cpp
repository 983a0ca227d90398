#include "gaborboost/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "gaborboost/errors.hpp"
#include "gaborboost/parallel.hpp"

namespace gaborboost {

namespace {

constexpr double kProbClip = 1e-6;
constexpr double kImprovement = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logit_of(double p) {
  p = std::clamp(p, kProbClip, 1.0 - kProbClip);
  return std::log(p / (1.0 - p));
}

std::vector<double> cuts_for(std::vector<double> values, std::size_t max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct = values;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  auto midpoint = [](double a, double b) {
    const double m = a + 0.5 * (b - a);
    return m > a ? m : b;
  };

  std::vector<double> cuts;
  if (distinct.size() <= max_bins) {
    for (std::size_t i = 1; i < distinct.size(); ++i) cuts.push_back(midpoint(distinct[i - 1], distinct[i]));
    return cuts;
  }

  const std::size_t n = values.size();
  for (std::size_t q = 1; q < max_bins; ++q) {
    const std::size_t pos = q * n / max_bins;
    if (pos == 0 || pos >= n) continue;
    // Move to the nearest boundary between distinct values.
    std::size_t fwd = pos, back = pos;
    while (fwd < n && values[fwd] == values[fwd - 1]) ++fwd;
    while (back > 0 && values[back] == values[back - 1]) --back;
    std::size_t boundary = 0;
    if (fwd < n && (back == 0 || fwd - pos <= pos - back)) {
      boundary = fwd;
    } else if (back > 0) {
      boundary = back;
    } else {
      continue;
    }
    const double cut = midpoint(values[boundary - 1], values[boundary]);
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  return cuts;
}

// Binned view of the training table in canonical row order.
struct Prepared {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::uint16_t> main_bins;  // n x d
  std::vector<std::uint16_t> pair_bins;  // n x d
  std::vector<int> y;
  std::vector<double> w;
  std::vector<char> is_val;
};

double log_loss(const Prepared& data, const std::vector<double>& logits, bool validation) {
  double loss = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    if (static_cast<bool>(data.is_val[i]) != validation) continue;
    const double p = std::clamp(sigmoid(logits[i]), 1e-15, 1.0 - 1e-15);
    loss -= data.w[i] * (data.y[i] ? std::log(p) : std::log(1.0 - p));
    weight += data.w[i];
  }
  return weight > 0.0 ? loss / weight : 0.0;
}

// Replaces the per-cell gradient sums in g (weights h) by the update for
// each cell: lr times the mean residual of the contiguous segment holding
// it. Cell 0 (missing) is always its own segment. max_leaves == 0 keeps
// every cell separate; otherwise the value cells are split into at most
// max_leaves segments maximizing the explained gradient sum of squares.
void segment_update(std::vector<double>& g, const std::vector<double>& h, std::size_t max_leaves, double lr) {
  const std::size_t n = g.size();
  auto mean = [&](double gs, double hs) { return hs > 0.0 ? lr * gs / hs : 0.0; };
  if (max_leaves == 0 || n <= 2) {
    for (std::size_t b = 0; b < n; ++b) g[b] = mean(g[b], h[b]);
    return;
  }
  g[0] = mean(g[0], h[0]);
  const std::size_t m = n - 1;
  std::vector<double> cg(m + 1, 0.0), ch(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    cg[i + 1] = cg[i] + g[i + 1];
    ch[i + 1] = ch[i] + h[i + 1];
  }
  auto gain = [&](std::size_t a, std::size_t b) {
    const double hs = ch[b] - ch[a];
    const double gs = cg[b] - cg[a];
    return hs > 0.0 ? gs * gs / hs : 0.0;
  };
  // best[k][j]: best gain covering cells [0, j) with k segments.
  const std::size_t leaves = std::min(max_leaves, m);
  const double none = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(leaves + 1, std::vector<double>(m + 1, none));
  std::vector<std::vector<std::size_t>> from(leaves + 1, std::vector<std::size_t>(m + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t k = 1; k <= leaves; ++k) {
    for (std::size_t j = 1; j <= m; ++j) {
      for (std::size_t a = k - 1; a < j; ++a) {
        if (best[k - 1][a] == none) continue;
        // Segments must hold data, except a lone segment.
        if (k > 1 && ch[j] - ch[a] <= 0.0) continue;
        const double v = best[k - 1][a] + gain(a, j);
        if (v > best[k][j] + 1e-12 * std::abs(v)) {
          best[k][j] = v;
          from[k][j] = a;
        }
      }
    }
  }
  std::size_t k_best = 1;
  for (std::size_t k = 2; k <= leaves; ++k) {
    if (best[k][m] > best[k_best][m] + 1e-12 * std::abs(best[k][m])) k_best = k;
  }
  std::size_t j = m;
  for (std::size_t k = k_best; k >= 1; --k) {
    const std::size_t a = from[k][j];
    const double u = mean(cg[j] - cg[a], ch[j] - ch[a]);
    for (std::size_t i = a; i < j; ++i) g[i + 1] = u;
    j = a;
  }
}

// Runs cyclic boosting rounds over `terms`, each term owning a score vector
// indexed by the per-row cell returned by cell_of(term, row). Restores the
// scores of the best validation round and returns the per-round losses.
template <typename CellOf>
std::vector<double> boost_terms(const Prepared& data, const EbmConfig& config, std::size_t leaves,
                                std::vector<std::vector<double>>& scores, std::vector<double>& logits, CellOf cell_of,
                                std::size_t& best_round) {
  const bool has_val = std::any_of(data.is_val.begin(), data.is_val.end(), [](char v) { return v != 0; });
  std::vector<double> history{has_val ? log_loss(data, logits, true) : log_loss(data, logits, false)};
  double best = history.front();
  best_round = 0;
  auto best_scores = scores;
  std::size_t stale = 0;

  std::vector<double> grad_sum, weight_sum;
  for (std::size_t round = 1; round <= config.max_rounds; ++round) {
    for (std::size_t t = 0; t < scores.size(); ++t) {
      grad_sum.assign(scores[t].size(), 0.0);
      weight_sum.assign(scores[t].size(), 0.0);
      for (std::size_t i = 0; i < data.n; ++i) {
        if (data.is_val[i]) continue;
        const std::size_t cell = cell_of(t, i);
        grad_sum[cell] += data.w[i] * (data.y[i] - sigmoid(logits[i]));
        weight_sum[cell] += data.w[i];
      }
      segment_update(grad_sum, weight_sum, leaves, config.learning_rate);
      for (std::size_t b = 0; b < grad_sum.size(); ++b) scores[t][b] += grad_sum[b];
      for (std::size_t i = 0; i < data.n; ++i) logits[i] += grad_sum[cell_of(t, i)];
    }
    const double loss = has_val ? log_loss(data, logits, true) : log_loss(data, logits, false);
    history.push_back(loss);
    if (loss < best - kImprovement) {
      best = loss;
      best_round = round;
      best_scores = scores;
      stale = 0;
    } else if (has_val && ++stale >= config.patience) {
      break;
    }
  }

  // Roll the logits back to the best round.
  for (std::size_t t = 0; t < scores.size(); ++t) {
    for (std::size_t i = 0; i < data.n; ++i) {
      const std::size_t cell = cell_of(t, i);
      logits[i] += best_scores[t][cell] - scores[t][cell];
    }
  }
  scores = std::move(best_scores);
  return history;
}

}  // namespace

std::size_t FeatureBins::bin(double v) const {
  if (std::isnan(v)) return 0;
  return 1 + static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

BinMap build_bins(const FeatureMatrix& table, std::size_t max_bins) {
  if (table.rows == 0) throw TrainingError("build_bins: empty table");
  if (max_bins < 2) throw ConfigError("build_bins: max_bins must be at least 2");
  if (max_bins > 65000) throw ConfigError("build_bins: max_bins too large");
  BinMap bins(table.cols());
  for (std::size_t c = 0; c < table.cols(); ++c) {
    std::vector<double> column;
    column.reserve(table.rows);
    for (std::size_t r = 0; r < table.rows; ++r) {
      const double v = table.at(r, c);
      if (!std::isnan(v)) column.push_back(v);
    }
    bins[c].cuts = cuts_for(std::move(column), max_bins);
  }
  return bins;
}

double EbmModel::shape_score(std::size_t term, double value) const {
  const auto& s = shapes[term];
  return s.scores[bins[s.feature].bin(value)];
}

double EbmModel::pair_score(std::size_t term, double first_value, double second_value) const {
  const auto& p = pairs[term];
  const std::size_t cols = pair_bins[p.second].n_bins();
  return p.scores[pair_bins[p.first].bin(first_value) * cols + pair_bins[p.second].bin(second_value)];
}

double EbmModel::logit(std::span<const double> row) const {
  if (row.size() != feature_names.size()) throw ConfigError("EbmModel: row width does not match the model");
  double z = intercept;
  for (std::size_t t = 0; t < shapes.size(); ++t) z += shape_score(t, row[shapes[t].feature]);
  for (std::size_t t = 0; t < pairs.size(); ++t) z += pair_score(t, row[pairs[t].first], row[pairs[t].second]);
  return z;
}

double EbmModel::predict(std::span<const double> row) const { return sigmoid(logit(row)); }

EbmModel train_binary(const FeatureMatrix& table, std::span<const int> labels, const EbmConfig& config) {
  const std::size_t n = table.rows, d = table.cols();
  if (table.values.size() != n * d) throw TrainingError("train_binary: table size mismatch");
  if (labels.size() != n) throw TrainingError("train_binary: label count does not match row count");
  if (n < 20) throw TrainingError("train_binary: at least 20 rows required, got " + std::to_string(n));
  if (!(config.learning_rate > 0.0) || config.val_fraction < 0.0 || config.val_fraction >= 1.0) {
    throw ConfigError("train_binary: invalid learning_rate or val_fraction");
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] != 0 && labels[r] != 1) throw TrainingError("train_binary: labels must be 0 or 1");
    for (std::size_t c = 0; c < d; ++c) {
      if (!std::isfinite(table.at(r, c))) {
        throw TrainingError("train_binary: non-finite value at row " + std::to_string(r) + ", column '" +
                            table.names[c] + "'");
      }
    }
  }

  EbmModel model;
  model.feature_names = table.names;
  model.bins = build_bins(table, config.max_bins);
  model.pair_bins = build_bins(table, std::max<std::size_t>(2, config.max_pair_bins));

  std::size_t positives = 0;
  for (int y : labels) positives += static_cast<std::size_t>(y);

  model.shapes.resize(d);
  for (std::size_t f = 0; f < d; ++f) {
    model.shapes[f].feature = f;
    model.shapes[f].scores.assign(model.bins[f].n_bins(), 0.0);
  }
  model.shape_importance.assign(d, 0.0);

  if (positives == 0 || positives == n) {
    model.intercept = logit_of(static_cast<double>(positives) / static_cast<double>(n));
    return model;
  }

  // Canonical order: label, then feature values, then original index.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labels[a] != labels[b]) return labels[a] < labels[b];
    const auto ra = table.row(a), rb = table.row(b);
    for (std::size_t c = 0; c < d; ++c) {
      if (ra[c] != rb[c]) return ra[c] < rb[c];
    }
    return a < b;
  });

  Prepared data;
  data.n = n;
  data.d = d;
  data.main_bins.resize(n * d);
  data.pair_bins.resize(n * d);
  data.y.resize(n);
  data.w.assign(n, 1.0);
  data.is_val.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = table.row(order[i]);
    data.y[i] = labels[order[i]];
    for (std::size_t c = 0; c < d; ++c) {
      data.main_bins[i * d + c] = static_cast<std::uint16_t>(model.bins[c].bin(row[c]));
      data.pair_bins[i * d + c] = static_cast<std::uint16_t>(model.pair_bins[c].bin(row[c]));
    }
  }
  if (config.balance_classes) {
    const double counts[2] = {static_cast<double>(n - positives), static_cast<double>(positives)};
    for (std::size_t i = 0; i < n; ++i) data.w[i] = static_cast<double>(n) / (2.0 * counts[data.y[i]]);
  }

  // Stratified validation split: seeded shuffle within each label block.
  std::mt19937_64 rng(config.seed);
  const std::size_t negatives = n - positives;
  for (auto [begin, count] : {std::pair{std::size_t{0}, negatives}, std::pair{negatives, positives}}) {
    std::vector<std::size_t> members(count);
    std::iota(members.begin(), members.end(), begin);
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(count)));
    for (std::size_t k = 0; k < std::min(n_val, count > 0 ? count - 1 : 0); ++k) data.is_val[members[k]] = 1;
  }

  double pos_weight = 0.0, total_weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.is_val[i]) continue;
    pos_weight += data.w[i] * data.y[i];
    total_weight += data.w[i];
  }
  const double base = logit_of(pos_weight / total_weight);
  std::vector<double> logits(n, base);

  // Phase 1: main effects.
  std::vector<std::vector<double>> main_scores(d);
  for (std::size_t f = 0; f < d; ++f) main_scores[f].assign(model.bins[f].n_bins(), 0.0);
  std::size_t best_main = 0;
  model.validation_losses = boost_terms(
      data, config, config.max_leaves, main_scores, logits, [&](std::size_t t, std::size_t i) { return data.main_bins[i * d + t]; },
      best_main);
  model.best_round = best_main;

  // Phase 2: screen pairs on the frozen main-effect residuals.
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  if (config.max_pairs > 0 && d >= 2) {
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = data.y[i] - sigmoid(logits[i]);
    struct Candidate {
      double gain;
      std::size_t a, b;
    };
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a + 1; b < d; ++b) {
        const std::size_t cols = model.pair_bins[b].n_bins();
        std::vector<double> rs(model.pair_bins[a].n_bins() * cols, 0.0), ws(rs.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (data.is_val[i]) continue;
          const std::size_t cell = data.pair_bins[i * d + a] * cols + data.pair_bins[i * d + b];
          rs[cell] += data.w[i] * residual[i];
          ws[cell] += data.w[i];
        }
        double gain = 0.0;
        for (std::size_t c = 0; c < rs.size(); ++c) {
          if (ws[c] > 0.0) gain += rs[c] * rs[c] / ws[c];
        }
        candidates.push_back({gain, a, b});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.gain > y.gain; });
    for (std::size_t k = 0; k < std::min(config.max_pairs, candidates.size()); ++k) {
      if (candidates[k].gain > 0.0) chosen.emplace_back(candidates[k].a, candidates[k].b);
    }
  }

  std::vector<std::vector<double>> pair_scores(chosen.size());
  for (std::size_t t = 0; t < chosen.size(); ++t) {
    pair_scores[t].assign(model.pair_bins[chosen[t].first].n_bins() * model.pair_bins[chosen[t].second].n_bins(), 0.0);
  }
  if (!chosen.empty()) {
    std::size_t best_pair_round = 0;
    // Pair cells have no total order, so each cell is updated on its own.
    auto history = boost_terms(
        data, config, 0, pair_scores, logits,
        [&](std::size_t t, std::size_t i) {
          const auto [a, b] = chosen[t];
          return static_cast<std::size_t>(data.pair_bins[i * d + a]) * model.pair_bins[b].n_bins() +
                 data.pair_bins[i * d + b];
        },
        best_pair_round);
    model.validation_losses.insert(model.validation_losses.end(), history.begin() + 1, history.end());
  }

  // Centre each term on the training population and fold the means into
  // the intercept; importances are mean absolute contributions.
  model.intercept = base;
  for (std::size_t f = 0; f < d; ++f) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += main_scores[f][data.main_bins[i * d + f]];
    mean /= static_cast<double>(n);
    for (double& s : main_scores[f]) s -= mean;
    model.intercept += mean;
    double imp = 0.0;
    for (std::size_t i = 0; i < n; ++i) imp += std::abs(main_scores[f][data.main_bins[i * d + f]]);
    model.shape_importance[f] = imp / static_cast<double>(n);
    model.shapes[f].scores = std::move(main_scores[f]);
  }
  for (std::size_t t = 0; t < chosen.size(); ++t) {
    const auto [a, b] = chosen[t];
    const std::size_t cols = model.pair_bins[b].n_bins();
    auto cell = [&](std::size_t i) {
      return static_cast<std::size_t>(data.pair_bins[i * d + a]) * cols + data.pair_bins[i * d + b];
    };
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += pair_scores[t][cell(i)];
    mean /= static_cast<double>(n);
    for (double& s : pair_scores[t]) s -= mean;
    model.intercept += mean;
    double imp = 0.0;
    for (std::size_t i = 0; i < n; ++i) imp += std::abs(pair_scores[t][cell(i)]);
    model.pairs.push_back({a, b, std::move(pair_scores[t])});
    model.pair_importance.push_back(imp / static_cast<double>(n));
  }
  return model;
}

OvrEnsemble::Prediction OvrEnsemble::predict(std::span<const double> row) const {
  Prediction p;
  p.probabilities.reserve(models.size());
  for (const auto& m : models) p.probabilities.push_back(m.predict(row));
  for (std::size_t c = 1; c < p.probabilities.size(); ++c) {
    if (p.probabilities[c] > p.probabilities[p.class_index]) p.class_index = c;
  }
  return p;
}

OvrEnsemble train_ovr(const FeatureMatrix& table, std::span<const std::string> labels, const EbmConfig& config) {
  if (labels.size() != table.rows) throw TrainingError("train_ovr: label count does not match row count");
  OvrEnsemble ens;
  ens.classes.assign(labels.begin(), labels.end());
  std::sort(ens.classes.begin(), ens.classes.end());
  ens.classes.erase(std::unique(ens.classes.begin(), ens.classes.end()), ens.classes.end());
  if (ens.classes.size() < 2) throw TrainingError("train_ovr: need at least two classes");

  ens.models.resize(ens.classes.size());
  parallel_for(ens.classes.size(), [&](std::size_t c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == ens.classes[c] ? 1 : 0;
    ens.models[c] = train_binary(table, y, config);
  });
  return ens;
}

nlohmann::json model_to_json(const EbmModel& m) {
  using nlohmann::json;
  json j;
  j["format"] = "gaborboost-ebm";
  j["version"] = kModelSchemaVersion;
  j["link"] = "logistic";
  j["feature_names"] = m.feature_names;
  j["intercept"] = m.intercept;
  json bins = json::array(), pair_bins = json::array();
  for (const auto& b : m.bins) bins.push_back(b.cuts);
  for (const auto& b : m.pair_bins) pair_bins.push_back(b.cuts);
  j["bin_cuts"] = bins;
  j["pair_bin_cuts"] = pair_bins;
  json shapes = json::array();
  for (std::size_t t = 0; t < m.shapes.size(); ++t) {
    shapes.push_back({{"feature", m.shapes[t].feature},
                      {"scores", m.shapes[t].scores},
                      {"importance", t < m.shape_importance.size() ? m.shape_importance[t] : 0.0}});
  }
  j["shapes"] = shapes;
  json pairs = json::array();
  for (std::size_t t = 0; t < m.pairs.size(); ++t) {
    pairs.push_back({{"features", {m.pairs[t].first, m.pairs[t].second}},
                     {"scores", m.pairs[t].scores},
                     {"importance", t < m.pair_importance.size() ? m.pair_importance[t] : 0.0}});
  }
  j["pairs"] = pairs;
  return j;
}

EbmModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "gaborboost-ebm") throw ParseError("model: unexpected format tag");
    const int version = j.at("version").get<int>();
    if (version != kModelSchemaVersion) {
      throw ParseError("model: schema version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kModelSchemaVersion) + ")");
    }
    EbmModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.intercept = j.at("intercept").get<double>();
    for (const auto& c : j.at("bin_cuts")) m.bins.push_back({c.get<std::vector<double>>()});
    for (const auto& c : j.at("pair_bin_cuts")) m.pair_bins.push_back({c.get<std::vector<double>>()});
    const std::size_t d = m.feature_names.size();
    if (m.bins.size() != d || m.pair_bins.size() != d) throw ParseError("model: bin map does not match features");
    for (const auto& s : j.at("shapes")) {
      ShapeFunction f{s.at("feature").get<std::size_t>(), s.at("scores").get<std::vector<double>>()};
      if (f.feature >= d || f.scores.size() != m.bins[f.feature].n_bins()) throw ParseError("model: malformed shape");
      m.shapes.push_back(std::move(f));
      m.shape_importance.push_back(s.at("importance").get<double>());
    }
    for (const auto& p : j.at("pairs")) {
      const auto feats = p.at("features").get<std::vector<std::size_t>>();
      if (feats.size() != 2 || feats[0] >= d || feats[1] >= d) throw ParseError("model: malformed pair");
      PairFunction f{feats[0], feats[1], p.at("scores").get<std::vector<double>>()};
      if (f.scores.size() != m.pair_bins[f.first].n_bins() * m.pair_bins[f.second].n_bins()) {
        throw ParseError("model: pair score grid has the wrong size");
      }
      m.pairs.push_back(std::move(f));
      m.pair_importance.push_back(p.at("importance").get<double>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

nlohmann::json ensemble_to_json(const OvrEnsemble& ens) {
  nlohmann::json j;
  j["format"] = "gaborboost-ovr";
  j["version"] = kModelSchemaVersion;
  j["classes"] = ens.classes;
  j["models"] = nlohmann::json::array();
  for (const auto& m : ens.models) j["models"].push_back(model_to_json(m));
  return j;
}

OvrEnsemble ensemble_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "gaborboost-ovr") throw ParseError("ensemble: unexpected format tag");
    if (j.at("version").get<int>() != kModelSchemaVersion) throw ParseError("ensemble: unsupported schema version");
    OvrEnsemble ens;
    ens.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& m : j.at("models")) ens.models.push_back(model_from_json(m));
    if (ens.models.size() != ens.classes.size()) throw ParseError("ensemble: class and model counts differ");
    return ens;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ensemble: ") + e.what());
  }
}

namespace {

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << j.dump(1) << "\n";
  if (!out) throw Error(path.string() + ": write failed");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_model(const EbmModel& model, const std::filesystem::path& path) { write_json(model_to_json(model), path); }
EbmModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }
void save_ensemble(const OvrEnsemble& ens, const std::filesystem::path& path) { write_json(ensemble_to_json(ens), path); }
OvrEnsemble load_ensemble(const std::filesystem::path& path) { return ensemble_from_json(read_json(path)); }

}  // namespace gaborboost
