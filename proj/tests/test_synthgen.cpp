#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gaborboost/errors.hpp"
#include "gaborboost/features.hpp"
#include "gaborboost/synthgen.hpp"
#include "test_util.hpp"

using namespace gaborboost;

namespace {
SynthSpec single(std::size_t l, std::size_t p, std::size_t v, double noise = 0.0) {
  SynthSpec s;
  s.longitudinal = l;
  s.partial = p;
  s.vortex = v;
  s.noise_sigma = noise;
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Depth of the dip in one row relative to the shoulder-free surrounding level.
double row_depth(const GrayImage& img, std::size_t r, int col) {
  const double edge = 0.5 * (img(r, col - 12) + img(r, col + 12));
  return edge - img(r, col);
}
}  // namespace

TEST(Synthgen, SpecValidation) {
  SynthSpec s;
  s.width = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.noise_sigma = -1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.height = 0;
  EXPECT_THROW(generate(s), ConfigError);
}

TEST(Synthgen, NoiselessLongitudinalVerticallySymmetric) {
  const auto out = generate(single(1, 0, 0));
  ASSERT_EQ(out.data.size(), 1u);
  const GrayImage& img = out.data.images[0];
  const std::size_t h = img.height();
  for (std::size_t r = 0; r < h / 2; ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) EXPECT_NEAR(img(r, c), img(h - 1 - r, c), 1e-12);
  }
}

TEST(Synthgen, Deterministic) {
  const auto a = generate(single(5, 4, 3, 0.02)), b = generate(single(5, 4, 3, 0.02));
  EXPECT_EQ(a.data.images, b.data.images);
  EXPECT_EQ(a.data.labels, b.data.labels);
  EXPECT_EQ(a.data.names, b.data.names);
  auto other = single(5, 4, 3, 0.02);
  other.seed = 8;
  EXPECT_NE(generate(other).data.images, a.data.images);
}

TEST(Synthgen, LabelsAndTruth) {
  const auto out = generate(single(2, 3, 4, 0.02));
  EXPECT_EQ(out.data.size(), 9u);
  EXPECT_EQ(std::count(out.data.labels.begin(), out.data.labels.end(), kPartial), 3);
  EXPECT_EQ(std::count(out.data.labels.begin(), out.data.labels.end(), kVortex), 4);
  for (std::size_t i = 0; i < out.truth.size(); ++i) {
    EXPECT_EQ(out.truth[i].name, out.data.names[i]);
    EXPECT_EQ(out.truth[i].label, out.data.labels[i]);
    EXPECT_GE(out.truth[i].dip_column, 0.4 * 128 - 1);
    EXPECT_LE(out.truth[i].dip_column, 0.6 * 128 + 1);
    EXPECT_EQ(out.truth[i].asymmetry_sign, out.truth[i].label == kVortex ? 1 : 0);
  }
}

TEST(Synthgen, LongitudinalMirrorSymmetricAboutDip) {
  const auto out = generate(single(3, 0, 0));
  for (std::size_t i = 0; i < 3; ++i) {
    const GrayImage& img = out.data.images[i];
    const int c0 = out.truth[i].dip_column;
    for (std::size_t r = 0; r < img.height(); r += 7) {
      for (int d = 1; d < 10; ++d) {
        // The cloud is centred on the frame, not the dip, so compare the
        // dip modulation only: ratio to the undisturbed cloud is symmetric.
        const double left = img(r, c0 - d), right = img(r, c0 + d);
        EXPECT_NEAR(left, right, 0.05 * std::max(left, right) + 1e-12);
      }
    }
  }
}

TEST(Synthgen, PartialDipConfinedToUpperHalf) {
  const auto out = generate(single(0, 5, 0));
  for (std::size_t i = 0; i < 5; ++i) {
    const GrayImage& img = out.data.images[i];
    const int col = out.truth[i].dip_column;
    double upper = 0.0, lower = 0.0;
    const std::size_t h = img.height();
    for (std::size_t r = 0; r < h / 2; ++r) upper += row_depth(img, r, col);
    for (std::size_t r = h / 2; r < h; ++r) lower += row_depth(img, r, col);
    EXPECT_GE(upper, 3.0 * lower) << out.data.names[i];
    EXPECT_LT(out.truth[i].extent_bottom, static_cast<int>(h / 2) + 1);
  }
}

TEST(Synthgen, WriteGroundTruth) {
  testutil::TempDir dir("synth");
  const auto out = generate(single(1, 1, 1));
  write_ground_truth(out.truth, dir / "gt.csv");
  const std::string text = testutil::read_text(dir / "gt.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "filename,label,dip_column,extent_top,extent_bottom,asymmetry_sign");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Synthgen, EgfSignatureOnDefaultSpec) {
  const auto out = generate(SynthSpec{});
  std::vector<double> vortex, longitudinal;
  // Tabularizing every image is slow; every 4th longitudinal and all vortices suffice.
  LabeledDataset subset;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    if (out.data.labels[i] == kVortex || (out.data.labels[i] == kLongitudinal && i % 4 == 0)) {
      subset.images.push_back(out.data.images[i]);
      subset.labels.push_back(out.data.labels[i]);
      subset.names.push_back(out.data.names[i]);
    }
  }
  for (const auto& row : tabularize(subset, std::nullopt)) {
    (row.label == kVortex ? vortex : longitudinal).push_back(row.egf_bl_br);
  }
  EXPECT_LT(median(vortex), 1.0);
  EXPECT_GE(median(longitudinal), 0.9);
  EXPECT_LE(median(longitudinal), 1.1);
}
