#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gaborboost/dataio.hpp"
#include "gaborboost/errors.hpp"
#include "test_util.hpp"

using namespace gaborboost;
using testutil::TempDir;

TEST(GrayImage, RejectsBadData) {
  EXPECT_THROW(GrayImage(2, 2, std::vector<double>{1, 2, 3}), SizeError);
  EXPECT_THROW(GrayImage(1, 1, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}), ParameterError);
  EXPECT_THROW(GrayImage(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}), ParameterError);
}

TEST(FlipHorizontal, ReversesRow) {
  const GrayImage img(3, 1, std::vector<double>{1, 2, 3});
  const GrayImage f = flip_horizontal(img);
  EXPECT_EQ(f, GrayImage(3, 1, std::vector<double>{3, 2, 1}));
}

TEST(FlipHorizontal, SymmetricRowIsFixed) {
  const GrayImage img(3, 1, std::vector<double>{1, 2, 1});
  EXPECT_EQ(flip_horizontal(img), img);
}

TEST(FlipHorizontal, Involution) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const GrayImage img = testutil::random_image(1 + rng() % 9, 1 + rng() % 9, rng);
    const GrayImage once = flip_horizontal(img);
    EXPECT_EQ(flip_horizontal(once), img);
    EXPECT_EQ(once.width(), img.width());
    EXPECT_EQ(once.height(), img.height());
  }
}

TEST(LoadImage, AsciiPgmNormalisedByMaxval) {
  TempDir dir("dataio");
  testutil::write_text(dir / "a.pgm", "P2\n# comment\n2 2\n255\n0 255\n255 0\n");
  const GrayImage img = load_image(dir / "a.pgm");
  EXPECT_EQ(img, GrayImage(2, 2, std::vector<double>{0, 1, 1, 0}));
}

TEST(LoadImage, BinaryPgm8And16Bit) {
  TempDir dir("dataio");
  std::string p8 = "P5\n2 1\n200\n";
  p8 += static_cast<char>(50);
  p8 += static_cast<char>(200);
  testutil::write_text(dir / "b.pgm", p8);
  const GrayImage a = load_image(dir / "b.pgm");
  EXPECT_DOUBLE_EQ(a(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(a(0, 1), 1.0);

  std::string p16 = "P5 1 1 1000\n";
  p16 += static_cast<char>(0x01);  // big-endian 500
  p16 += static_cast<char>(0xF4);
  testutil::write_text(dir / "c.pgm", p16);
  EXPECT_DOUBLE_EQ(load_image(dir / "c.pgm")(0, 0), 0.5);
}

TEST(LoadImage, PgmErrors) {
  TempDir dir("dataio");
  testutil::write_text(dir / "bad.pgm", "P7\n1 1\n255\n0\n");
  EXPECT_THROW(load_image(dir / "bad.pgm"), ParseError);
  testutil::write_text(dir / "short.pgm", "P2\n2 2\n255\n0 1 2\n");
  EXPECT_THROW(load_image(dir / "short.pgm"), ParseError);
  testutil::write_text(dir / "over.pgm", "P2\n1 1\n10\n11\n");
  EXPECT_THROW(load_image(dir / "over.pgm"), ParseError);
  EXPECT_THROW(load_image(dir / "missing.pgm"), ParseError);
}

TEST(LoadImage, CsvDividesByMaxAbs) {
  TempDir dir("dataio");
  testutil::write_text(dir / "m.csv", "1,2\n3,4\n");
  EXPECT_EQ(load_image(dir / "m.csv"), GrayImage(2, 2, std::vector<double>{0.25, 0.5, 0.75, 1.0}));
}

TEST(LoadImage, CsvRaggedRowNamesLine) {
  TempDir dir("dataio");
  testutil::write_text(dir / "r.csv", "1,2\n3\n");
  try {
    load_image(dir / "r.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("ragged row at line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("r.csv"), std::string::npos) << msg;
  }
}

TEST(LoadImage, CsvNonFinite) {
  TempDir dir("dataio");
  testutil::write_text(dir / "n.csv", "1,2\n3,inf\n");
  EXPECT_THROW(load_image(dir / "n.csv"), ParseError);
  testutil::write_text(dir / "t.csv", "1,x\n");
  EXPECT_THROW(load_image(dir / "t.csv"), ParseError);
}

TEST(WritePgm, RoundTrip16Bit) {
  TempDir dir("dataio");
  std::mt19937_64 rng(1);
  const GrayImage img = testutil::random_image(7, 5, rng);
  write_pgm(img, dir / "x.pgm");
  const GrayImage back = load_image(dir / "x.pgm");
  ASSERT_EQ(back.width(), 7u);
  ASSERT_EQ(back.height(), 5u);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back.data()[i], img.data()[i], 0.5 / 65535 + 1e-15);
}

TEST(Dataset, SaveLoadSortedByName) {
  TempDir dir("dataio");
  LabeledDataset ds;
  ds.images = {GrayImage(2, 2, 0.5), GrayImage(2, 2, 1.0)};
  ds.labels = {"b", "a"};
  ds.names = {"z.pgm", "y.pgm"};
  save_dataset(ds, dir.path());
  const LabeledDataset back = load_dataset(dir.path());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.names, (std::vector<std::string>{"y.pgm", "z.pgm"}));
  EXPECT_EQ(back.labels, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(back.images[0](1, 1), 1.0);
}

TEST(Dataset, ValidateClassSet) {
  LabeledDataset ds;
  ds.images = {GrayImage(1, 1)};
  ds.labels = {"canted"};
  ds.names = {"a"};
  EXPECT_THROW(ds.validate({"longitudinal", "partial"}), ConfigError);
  EXPECT_NO_THROW(ds.validate());
  ds.names.clear();
  EXPECT_THROW(ds.validate(), ConfigError);
}

namespace {
LabeledDataset top_bottom() {
  LabeledDataset ds;
  ds.images = {GrayImage(3, 1, std::vector<double>{1, 2, 3}), GrayImage(3, 1, std::vector<double>{4, 5, 6})};
  ds.labels = {"top", "bottom"};
  ds.names = {"t", "b"};
  return ds;
}
}  // namespace

TEST(ReduceClasses, MergesAndFlips) {
  const auto out = reduce_classes(top_bottom(), {{"top", "partial"}, {"bottom", "partial"}}, {"bottom"});
  EXPECT_EQ(out.labels, (std::vector<std::string>{"partial", "partial"}));
  EXPECT_EQ(out.images[0], top_bottom().images[0]);
  EXPECT_EQ(out.images[1], GrayImage(3, 1, std::vector<double>{6, 5, 4}));
  EXPECT_EQ(out.size(), 2u);
}

TEST(ReduceClasses, IdentityIsNoop) {
  const auto ds = top_bottom();
  const auto out = reduce_classes(ds, {{"top", "top"}, {"bottom", "bottom"}}, {});
  EXPECT_EQ(out.labels, ds.labels);
  EXPECT_EQ(out.names, ds.names);
  EXPECT_EQ(out.images, ds.images);
}

TEST(ReduceClasses, UnmappedLabelIsError) {
  auto ds = top_bottom();
  ds.labels[1] = "canted";
  EXPECT_THROW(reduce_classes(ds, {{"top", "partial"}}, {}), ConfigError);
  EXPECT_THROW(reduce_classes(top_bottom(), {{"top", "p"}, {"bottom", "p"}}, {"side"}), ConfigError);
}

namespace {
FeatureRow sample_row(bool with_pf) {
  FeatureRow r;
  r.id = "img_00001.pgm";
  r.sigma_x = 2;
  r.sigma_y = 12;
  r.lambda = 2 * M_PI / 12;
  r.x_star = 0.4921875;
  r.y_star = 1.0 / 3.0;
  r.q_tl = 0.1234567890123456789;
  r.q_tr = 1e-300;
  r.q_bl = 7.0;
  r.q_br = 3.141592653589793;
  r.egf_tl_bl = r.q_tl / (r.q_bl + 1e-9);
  r.egf_tr_br = 0.0;
  r.egf_tl_tr = 1e200;
  r.egf_bl_br = 2.0 / 3.0;
  if (with_pf) r.pf = PfParams{0.3, 61.7, 3.2, -0.25, 0.01};
  r.label = "vortex";
  return r;
}
}  // namespace

TEST(FeatureTable, HeaderOrder) {
  EXPECT_EQ(feature_table_columns(false).size(), 15u);
  EXPECT_EQ(feature_table_columns(true).size(), 20u);
  TempDir dir("dataio");
  write_feature_table({}, dir / "e.csv");
  EXPECT_EQ(testutil::read_text(dir / "e.csv"),
            "id,sigma_x,sigma_y,lambda,x_star,y_star,q_tl,q_tr,q_bl,q_br,egf_tl_bl,egf_tr_br,egf_tl_tr,egf_bl_br,"
            "label\n");
  EXPECT_TRUE(read_feature_table(dir / "e.csv").empty());
}

TEST(FeatureTable, RoundTripExact) {
  TempDir dir("dataio");
  for (bool pf : {false, true}) {
    FeatureRow failed = sample_row(pf);
    failed.id = "second";
    if (pf) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      failed.pf = PfParams{nan, nan, nan, nan, nan};
    }
    const std::vector<FeatureRow> rows{sample_row(pf), failed};
    write_feature_table(rows, dir / "t.csv");
    const auto back = read_feature_table(dir / "t.csv");
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(back[i].id, rows[i].id);
      EXPECT_EQ(back[i].label, rows[i].label);
      for (const auto& col : feature_table_columns(pf)) {
        if (col == "id" || col == "label") continue;
        const double a = feature_value(rows[i], col), b = feature_value(back[i], col);
        if (std::isnan(a)) {
          EXPECT_TRUE(std::isnan(b)) << col;
        } else {
          EXPECT_EQ(a, b) << col;
        }
      }
    }
    if (pf) EXPECT_TRUE(back[1].pf_failed());
  }
}

TEST(FeatureTable, MixedSchemaRejected) {
  TempDir dir("dataio");
  EXPECT_THROW(write_feature_table({sample_row(true), sample_row(false)}, dir / "m.csv"), ConfigError);
}

TEST(FeatureTable, UnknownColumnNamed) {
  TempDir dir("dataio");
  testutil::write_text(dir / "u.csv", "id,sigma_x,bogus,label\n");
  try {
    read_feature_table(dir / "u.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(FeatureTable, HeaderOrderMismatch) {
  TempDir dir("dataio");
  auto cols = feature_table_columns(false);
  std::swap(cols[1], cols[2]);
  std::string header;
  for (const auto& c : cols) header += (header.empty() ? "" : ",") + c;
  testutil::write_text(dir / "o.csv", header + "\n");
  EXPECT_THROW(read_feature_table(dir / "o.csv"), ParseError);
}

TEST(FeatureTable, WrongFieldCount) {
  TempDir dir("dataio");
  testutil::write_text(dir / "w.csv",
                       "id,sigma_x,sigma_y,lambda,x_star,y_star,q_tl,q_tr,q_bl,q_br,egf_tl_bl,egf_tr_br,egf_tl_tr,"
                       "egf_bl_br,label\na,1,2,3\n");
  EXPECT_THROW(read_feature_table(dir / "w.csv"), ParseError);
}
