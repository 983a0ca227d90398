#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gaborboost/ebm.hpp"
#include "gaborboost/errors.hpp"
#include "test_util.hpp"

using namespace gaborboost;

namespace {

FeatureMatrix make_table(std::vector<std::string> names, const std::vector<std::vector<double>>& rows) {
  FeatureMatrix t;
  t.names = std::move(names);
  t.rows = rows.size();
  for (const auto& r : rows) t.values.insert(t.values.end(), r.begin(), r.end());
  return t;
}

struct Toy {
  FeatureMatrix table;
  std::vector<int> labels;
};

// Two informative features, one with an interaction, one noise column.
Toy toy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1), p(0, 1);
  Toy t;
  t.table.names = {"a", "b", "c"};
  t.table.rows = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    t.table.values.insert(t.table.values.end(), {a, b, c});
    const double z = 2 * a - b * b + 1.5 * a * b;
    t.labels.push_back(p(rng) < 1 / (1 + std::exp(-z)));
  }
  return t;
}

std::size_t bin_oracle(const std::vector<double>& cuts, double v) {
  if (std::isnan(v)) return 0;
  std::size_t b = 1;
  for (double c : cuts) b += v > c ? 1 : 0;
  return b;
}

// Logit rebuilt from the serialized JSON alone.
double json_logit(const nlohmann::json& j, std::span<const double> row) {
  double z = j["intercept"].get<double>();
  for (const auto& s : j["shapes"]) {
    const auto f = s["feature"].get<std::size_t>();
    const auto cuts = j["bin_cuts"][f].get<std::vector<double>>();
    z += s["scores"][bin_oracle(cuts, row[f])].get<double>();
  }
  for (const auto& p : j["pairs"]) {
    const auto a = p["features"][0].get<std::size_t>(), b = p["features"][1].get<std::size_t>();
    const auto ca = j["pair_bin_cuts"][a].get<std::vector<double>>();
    const auto cb = j["pair_bin_cuts"][b].get<std::vector<double>>();
    z += p["scores"][bin_oracle(ca, row[a]) * (cb.size() + 2) + bin_oracle(cb, row[b])].get<double>();
  }
  return z;
}

}  // namespace

TEST(Bins, BinaryFeature) {
  const auto bins = build_bins(make_table({"x"}, {{0}, {1}, {1}, {0}}), 64);
  EXPECT_EQ(bins[0].cuts, (std::vector<double>{0.5}));
  EXPECT_EQ(bins[0].bin(0.0), 1u);
  EXPECT_EQ(bins[0].bin(1.0), 2u);
  EXPECT_EQ(bins[0].bin(NAN), 0u);
}

TEST(Bins, ConstantFeatureSingleBin) {
  const auto bins = build_bins(make_table({"x"}, {{3}, {3}, {3}}), 64);
  EXPECT_TRUE(bins[0].cuts.empty());
  EXPECT_EQ(bins[0].bin(-100), 1u);
  EXPECT_EQ(bins[0].bin(100), 1u);
}

TEST(Bins, UniformQuantiles) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> rows(1000);
  for (auto& r : rows) r = {u(rng)};
  const auto table = make_table({"x"}, rows);
  const auto bins = build_bins(table, 4);
  ASSERT_EQ(bins[0].cuts.size(), 3u);
  std::vector<int> counts(bins[0].n_bins(), 0);
  for (const auto& r : rows) ++counts[bin_oracle(bins[0].cuts, r[0])];
  EXPECT_EQ(counts[0], 0);
  for (std::size_t b = 1; b < counts.size(); ++b) EXPECT_NEAR(counts[b], 250, 1);
}

TEST(Bins, CutsAscendingAndTotal) {
  std::mt19937_64 rng(2);
  std::poisson_distribution<int> pois(3);
  std::vector<std::vector<double>> rows(500);
  for (auto& r : rows) r = {static_cast<double>(pois(rng)), std::exp(static_cast<double>(pois(rng)))};
  const auto bins = build_bins(make_table({"a", "b"}, rows), 4);
  for (const auto& b : bins) {
    EXPECT_LE(b.n_bins(), 4u + 1);
    EXPECT_TRUE(std::adjacent_find(b.cuts.begin(), b.cuts.end(), std::greater_equal<>()) == b.cuts.end());
    EXPECT_GE(b.bin(-1e300), 1u);
    EXPECT_LT(b.bin(1e300), b.n_bins());
  }
}

TEST(Bins, Preconditions) {
  EXPECT_THROW(build_bins(make_table({"x"}, {}), 8), TrainingError);
  EXPECT_THROW(build_bins(make_table({"x"}, {{1}}), 1), ConfigError);
}

TEST(Predict, ZeroModelIsHalf) {
  EbmModel m;
  m.feature_names = {"x"};
  m.bins = m.pair_bins = {FeatureBins{{0.0}}};
  m.shapes = {{0, {0.0, 0.0, 0.0}}};
  const double row[] = {0.3};
  EXPECT_EQ(m.predict(row), 0.5);
  m.intercept += 1.25;
  EXPECT_DOUBLE_EQ(m.logit(row), 1.25);
}

TEST(TrainBinary, AllOnesConstantModel) {
  std::vector<std::vector<double>> rows(30);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {static_cast<double>(i)};
  const auto table = make_table({"x"}, rows);
  const std::vector<int> labels(30, 1);
  const auto m = train_binary(table, labels);
  EXPECT_NEAR(m.intercept, std::log((1 - 1e-6) / 1e-6), 1e-9);
  for (const auto& s : m.shapes) {
    for (double v : s.scores) EXPECT_EQ(v, 0.0);
  }
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_GT(m.predict(table.row(3)), 0.999);
}

TEST(TrainBinary, Errors) {
  const auto small = make_table({"x"}, std::vector<std::vector<double>>(19, {1.0}));
  EXPECT_THROW(train_binary(small, std::vector<int>(19, 0)), TrainingError);
  auto t = toy(40, 1);
  t.table.values[3 * 7 + 2] = NAN;
  try {
    train_binary(t.table, t.labels);
    FAIL();
  } catch (const TrainingError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'c'"), std::string::npos) << msg;
  }
  auto bad = toy(40, 1);
  bad.labels[0] = 2;
  EXPECT_THROW(train_binary(bad.table, bad.labels), TrainingError);
}

TEST(TrainBinary, ThresholdFeature) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::vector<double>> rows(1000);
  std::vector<int> labels(1000);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {u(rng)};
    labels[i] = rows[i][0] > 0;
  }
  const auto table = make_table({"x"}, rows);
  const auto m = train_binary(table, labels);
  // A brute-force best threshold classifier is perfect on this data; the
  // model must match it.
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) correct += (m.predict(table.row(i)) > 0.5) == (labels[i] == 1);
  EXPECT_EQ(correct, rows.size());
  const auto& cuts = m.bins[0].cuts;
  const auto& scores = m.shapes[0].scores;
  const std::size_t zero_bin = bin_oracle(cuts, 0.0);
  for (std::size_t b = std::max<std::size_t>(2, zero_bin - 3); b <= std::min(scores.size() - 1, zero_bin + 3); ++b) {
    EXPECT_GE(scores[b], scores[b - 1]);
  }
}

TEST(TrainBinary, CenteredTermsAndImportance) {
  const auto t = toy(600, 3);
  const auto m = train_binary(t.table, t.labels);
  ASSERT_EQ(m.shapes.size(), 3u);
  for (std::size_t k = 0; k < m.shapes.size(); ++k) {
    double mean = 0.0, imp = 0.0;
    for (std::size_t i = 0; i < t.table.rows; ++i) {
      const double s = m.shape_score(k, t.table.at(i, m.shapes[k].feature));
      mean += s;
      imp += std::abs(s);
    }
    EXPECT_NEAR(mean / t.table.rows, 0.0, 1e-12);
    EXPECT_NEAR(imp / t.table.rows, m.shape_importance[k], 1e-12);
  }
  for (std::size_t k = 0; k < m.pairs.size(); ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < t.table.rows; ++i) {
      mean += m.pair_score(k, t.table.at(i, m.pairs[k].first), t.table.at(i, m.pairs[k].second));
    }
    EXPECT_NEAR(mean / t.table.rows, 0.0, 1e-12);
    EXPECT_LT(m.pairs[k].first, m.pairs[k].second);
  }
  EXPECT_GT(m.shape_importance[0], m.shape_importance[2]);
}

TEST(TrainBinary, ValidationLossNotWorseThanStart) {
  const auto t = toy(400, 4);
  const auto m = train_binary(t.table, t.labels);
  ASSERT_FALSE(m.validation_losses.empty());
  EXPECT_LE(m.validation_losses[m.best_round], m.validation_losses[0]);
}

TEST(TrainBinary, RowOrderInvariant) {
  const auto t = toy(300, 6);
  std::vector<std::size_t> perm(t.table.rows);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(9);
  std::shuffle(perm.begin(), perm.end(), rng);
  Toy p;
  p.table.names = t.table.names;
  p.table.rows = t.table.rows;
  for (std::size_t i : perm) {
    const auto r = t.table.row(i);
    p.table.values.insert(p.table.values.end(), r.begin(), r.end());
    p.labels.push_back(t.labels[i]);
  }
  EXPECT_EQ(model_to_json(train_binary(t.table, t.labels)).dump(),
            model_to_json(train_binary(p.table, p.labels)).dump());
}

TEST(TrainBinary, BalancedWeightsRaiseMinorityScores) {
  auto t = toy(400, 8);
  // Keep a 10% positive rate.
  std::mt19937_64 rng(1);
  for (auto& y : t.labels) {
    if (y && rng() % 4) y = 0;
  }
  EbmConfig balanced;
  balanced.balance_classes = true;
  const auto a = train_binary(t.table, t.labels), b = train_binary(t.table, t.labels, balanced);
  EXPECT_GT(b.intercept, a.intercept);
}

TEST(Modularity, LogitIsSumOfSerializedLookups) {
  const auto t = toy(500, 10);
  const auto m = train_binary(t.table, t.labels);
  const auto j = model_to_json(m);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 300; ++i) {
    const double row[] = {u(rng), u(rng), u(rng)};
    EXPECT_NEAR(m.logit(row), json_logit(j, row), 1e-12);
    EXPECT_NEAR(m.predict(row), 1 / (1 + std::exp(-json_logit(j, row))), 1e-12);
  }
}

TEST(Serialization, RoundTripBitExact) {
  testutil::TempDir dir("ebm");
  const auto t = toy(300, 12);
  const auto m = train_binary(t.table, t.labels);
  save_model(m, dir / "m.json");
  const auto back = load_model(dir / "m.json");
  for (std::size_t i = 0; i < t.table.rows; ++i) EXPECT_EQ(m.predict(t.table.row(i)), back.predict(t.table.row(i)));
  save_model(back, dir / "m2.json");
  EXPECT_EQ(testutil::read_text(dir / "m.json"), testutil::read_text(dir / "m2.json"));
}

TEST(Serialization, DeterministicFiles) {
  testutil::TempDir dir("ebm");
  const auto t = toy(300, 13);
  save_model(train_binary(t.table, t.labels), dir / "a.json");
  save_model(train_binary(t.table, t.labels), dir / "b.json");
  EXPECT_EQ(testutil::read_text(dir / "a.json"), testutil::read_text(dir / "b.json"));
}

TEST(Serialization, CorruptAndVersionMismatch) {
  testutil::TempDir dir("ebm");
  testutil::write_text(dir / "bad.json", "{ not json");
  EXPECT_THROW(load_model(dir / "bad.json"), ParseError);
  const auto t = toy(100, 14);
  auto j = model_to_json(train_binary(t.table, t.labels));
  j["version"] = kModelSchemaVersion + 1;
  EXPECT_THROW(model_from_json(j), ParseError);
  auto k = model_to_json(train_binary(t.table, t.labels));
  k["shapes"][0]["scores"].erase(0);
  EXPECT_THROW(model_from_json(k), ParseError);
  EXPECT_THROW(load_model(dir / "missing.json"), ParseError);
}

TEST(Ovr, ArgmaxAndClassOrder) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0, 0.3);
  FeatureMatrix t;
  t.names = {"x", "y"};
  std::vector<std::string> labels;
  const std::vector<std::pair<std::string, std::pair<double, double>>> centers = {
      {"zeta", {0, 0}}, {"alpha", {3, 0}}, {"mid", {0, 3}}};
  for (int i = 0; i < 300; ++i) {
    const auto& [name, c] = centers[i % 3];
    t.values.push_back(c.first + noise(rng));
    t.values.push_back(c.second + noise(rng));
    labels.push_back(name);
    ++t.rows;
  }
  const auto ens = train_ovr(t, labels);
  EXPECT_EQ(ens.classes, (std::vector<std::string>{"alpha", "mid", "zeta"}));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < t.rows; ++i) {
    const auto p = ens.predict(t.row(i));
    ASSERT_EQ(p.probabilities.size(), 3u);
    const auto best = std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin();
    EXPECT_EQ(static_cast<std::ptrdiff_t>(p.class_index), best);
    correct += ens.classes[p.class_index] == labels[i];
  }
  EXPECT_GE(correct, 295u);

  testutil::TempDir dir("ebm");
  save_ensemble(ens, dir / "e.json");
  const auto back = load_ensemble(dir / "e.json");
  EXPECT_EQ(back.classes, ens.classes);
  for (std::size_t i = 0; i < t.rows; ++i) EXPECT_EQ(back.predict(t.row(i)).probabilities, ens.predict(t.row(i)).probabilities);
}

TEST(Ovr, TiesGoToEarliestClass) {
  OvrEnsemble ens;
  ens.classes = {"a", "b"};
  EbmModel m;
  m.feature_names = {"x"};
  m.bins = m.pair_bins = {FeatureBins{}};
  m.shapes = {{0, {0.0, 0.0}}};
  ens.models = {m, m};
  const double row[] = {1.0};
  EXPECT_EQ(ens.predict(row).class_index, 0u);
}
