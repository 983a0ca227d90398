#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gaborboost/dataio.hpp"
#include "gaborboost/feature_row.hpp"
#include "gaborboost/gabor.hpp"

namespace gaborboost {

// Search spaces for the kernel scales and frequency. Each list is strictly
// ascending and positive.
struct ParamGrid {
  std::vector<double> sigma_x_values;
  std::vector<double> sigma_y_values;
  std::vector<double> lambda_values;

  void validate() const;
  std::size_t size() const { return sigma_x_values.size() * sigma_y_values.size() * lambda_values.size(); }

  // sigma_x from {2,3,4,6,8,12,16} up to width/4, sigma_y from
  // {2,3,4,6,8,12,16,24,32} up to height/3, lambda = 2 pi / L for
  // L in {4,6,8,12,16,24,32}. An axis whose candidates are all too large
  // keeps its smallest candidate.
  static ParamGrid defaults(std::size_t width, std::size_t height);
};

enum class OptimizeMode { FullGrid, TwoStep };

struct FeatureOptions {
  DcCorrection dc = DcCorrection::Axis;
  ConvolutionBackend backend = ConvolutionBackend::Separable;
  double epsilon = 1e-9;
  OptimizeMode mode = OptimizeMode::TwoStep;
  bool with_pf = false;
};

struct GridOptimum {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double lambda = 0.0;
  double norm = 0.0;
  std::size_t convolutions = 0;
};

// Exhaustive argmax of response_norm over sigma_x x sigma_y x lambda with
// theta = 0. Ties go to the earliest lexicographic grid position.
GridOptimum grid_optimize(const GrayImage& img, const ParamGrid& grid, const FeatureOptions& opt = {});

// Coordinate-wise search: fix sigma_x at max(sigma_x_values) and maximize
// over (sigma_y, lambda), then fix those and maximize over sigma_x. Uses
// exactly |sigma_y| * |lambda| + |sigma_x| convolutions.
GridOptimum two_step_optimize(const GrayImage& img, const ParamGrid& grid, const FeatureOptions& opt = {});

// Summed-area table of squared response magnitude.
// at(r, c) is the inclusive sum over rows <= r and cols <= c. area_sum
// treats pixel (r, c) as the unit cell [r - 0.5, r + 0.5] x [c - 0.5, c + 0.5]
// with constant density, so rectangles with fractional corners are exact.
class IntegralImage {
 public:
  IntegralImage(std::size_t width, std::size_t height, std::span<const double> magnitude);
  explicit IntegralImage(const ResponseField& field);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  double at(std::size_t row, std::size_t col) const { return sums_[(row + 1) * (width_ + 1) + col + 1]; }
  // Sum over rows [r0, r1) and cols [c0, c1).
  double rect_sum(std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) const;
  // Sum over the continuous rectangle [top, bottom] x [left, right] in pixel
  // coordinates; bounds are clamped to the field.
  double area_sum(double top, double left, double bottom, double right) const;

 private:
  double cumulative(double t_row, double t_col) const;

  std::size_t width_;
  std::size_t height_;
  std::vector<double> sums_;  // (height + 1) x (width + 1), zero first row/column
};

IntegralImage integral_image(const ResponseField& field);

struct PixelLocation {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const PixelLocation&) const = default;
};

// Position of max |G * u|; ties resolve to the smallest row, then column.
PixelLocation locate_center(const ResponseField& field);

struct QuadNorms {
  double tl = 0.0;
  double tr = 0.0;
  double bl = 0.0;
  double br = 0.0;
  // Some quadrant lost all area to clamping at the field border.
  bool degenerate = false;
};

// l2 norms over the four quadrants of the ROI centred on `center`, which
// extends sigma_rows above and below and sigma_cols left and right. The
// quadrants split the ROI at the center pixel's midpoint, so together they
// partition it exactly.
QuadNorms quad_responses(const IntegralImage& iu, PixelLocation center, double sigma_rows, double sigma_cols);

struct EgfRatios {
  double tl_bl = 0.0;
  double tr_br = 0.0;
  double tl_tr = 0.0;
  double bl_br = 0.0;
};

// numerator / (denominator + epsilon) for the pairs TL/BL, TR/BR, TL/TR, BL/BR.
EgfRatios engineered_features(const QuadNorms& q, double epsilon = 1e-9);

// Full per-image transform: parameter search, response field, center and
// quadrant norms.
struct QuadTransform {
  GridOptimum params;
  PixelLocation center;
  QuadNorms quads;
  EgfRatios egf;
};

QuadTransform gabor_quad_transform(const GrayImage& img, const ParamGrid& grid, const FeatureOptions& opt = {});

// One FeatureRow per record, in input order. Without an explicit grid each
// image uses ParamGrid::defaults for its size.
std::vector<FeatureRow> tabularize(const LabeledDataset& ds, const std::optional<ParamGrid>& grid,
                                   const FeatureOptions& opt = {});

}  // namespace gaborboost
