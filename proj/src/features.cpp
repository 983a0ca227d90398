#include "gaborboost/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gaborboost/errors.hpp"
#include "gaborboost/parallel.hpp"
#include "gaborboost/physfit.hpp"

namespace gaborboost {

namespace {

void check_axis(const std::vector<double>& values, const char* name) {
  if (values.empty()) throw ConfigError(std::string("ParamGrid: ") + name + " is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0) {
      throw ConfigError(std::string("ParamGrid: ") + name + " values must be positive and finite");
    }
    if (i > 0 && values[i] <= values[i - 1]) {
      throw ConfigError(std::string("ParamGrid: ") + name + " must be strictly ascending");
    }
  }
}

std::vector<double> capped(std::initializer_list<double> candidates, double limit) {
  std::vector<double> out;
  for (double v : candidates) {
    if (v <= limit) out.push_back(v);
  }
  if (out.empty()) out.push_back(*candidates.begin());
  return out;
}

double norm_at(const GrayImage& img, double sx, double sy, double lambda, const FeatureOptions& opt) {
  return response_norm(img, GaborParams{sx, sy, 0.0, lambda}, opt.dc, opt.backend);
}

}  // namespace

void ParamGrid::validate() const {
  check_axis(sigma_x_values, "sigma_x");
  check_axis(sigma_y_values, "sigma_y");
  check_axis(lambda_values, "lambda");
}

ParamGrid ParamGrid::defaults(std::size_t width, std::size_t height) {
  ParamGrid g;
  // Also keep each kernel's 2*3*sigma+1 support within three times its own axis (x = rows, y = columns).
  const double w = static_cast<double>(width), h = static_cast<double>(height);
  g.sigma_x_values = capped({2, 3, 4, 6, 8, 12, 16}, std::min(w / 4.0, (3.0 * h - 1.0) / 6.0));
  g.sigma_y_values = capped({2, 3, 4, 6, 8, 12, 16, 24, 32}, std::min(h / 3.0, (3.0 * w - 1.0) / 6.0));
  for (double period : {32.0, 24.0, 16.0, 12.0, 8.0, 6.0, 4.0}) {
    g.lambda_values.push_back(2.0 * std::numbers::pi / period);
  }
  return g;
}

GridOptimum grid_optimize(const GrayImage& img, const ParamGrid& grid, const FeatureOptions& opt) {
  grid.validate();
  GridOptimum best;
  best.norm = -1.0;
  for (double sx : grid.sigma_x_values) {
    for (double sy : grid.sigma_y_values) {
      for (double lambda : grid.lambda_values) {
        const double n = norm_at(img, sx, sy, lambda, opt);
        ++best.convolutions;
        if (n > best.norm) {
          best.sigma_x = sx;
          best.sigma_y = sy;
          best.lambda = lambda;
          best.norm = n;
        }
      }
    }
  }
  return best;
}

GridOptimum two_step_optimize(const GrayImage& img, const ParamGrid& grid, const FeatureOptions& opt) {
  grid.validate();
  GridOptimum best;
  const double sx_wide = grid.sigma_x_values.back();

  double best_norm = -1.0;
  for (double sy : grid.sigma_y_values) {
    for (double lambda : grid.lambda_values) {
      const double n = norm_at(img, sx_wide, sy, lambda, opt);
      ++best.convolutions;
      if (n > best_norm) {
        best.sigma_y = sy;
        best.lambda = lambda;
        best_norm = n;
      }
    }
  }

  best_norm = -1.0;
  for (double sx : grid.sigma_x_values) {
    const double n = norm_at(img, sx, best.sigma_y, best.lambda, opt);
    ++best.convolutions;
    if (n > best_norm) {
      best.sigma_x = sx;
      best_norm = n;
    }
  }
  best.norm = best_norm;
  return best;
}

IntegralImage::IntegralImage(std::size_t width, std::size_t height, std::span<const double> magnitude)
    : width_(width), height_(height), sums_((width + 1) * (height + 1), 0.0) {
  if (width == 0 || height == 0 || magnitude.size() != width * height) {
    throw SizeError("IntegralImage: field must be nonempty and match its dimensions");
  }
  const std::size_t stride = width_ + 1;
  for (std::size_t r = 0; r < height_; ++r) {
    double run = 0.0;
    for (std::size_t c = 0; c < width_; ++c) {
      const double m = magnitude[r * width_ + c];
      run += m * m;
      sums_[(r + 1) * stride + c + 1] = sums_[r * stride + c + 1] + run;
    }
  }
}

IntegralImage::IntegralImage(const ResponseField& field)
    : IntegralImage(field.width(), field.height(), field.magnitude()) {}

double IntegralImage::rect_sum(std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) const {
  r1 = std::min(r1, height_);
  c1 = std::min(c1, width_);
  if (r0 >= r1 || c0 >= c1) return 0.0;
  const std::size_t s = width_ + 1;
  return sums_[r1 * s + c1] - sums_[r0 * s + c1] - sums_[r1 * s + c0] + sums_[r0 * s + c0];
}

double IntegralImage::cumulative(double t_row, double t_col) const {
  // Bilinear interpolation of the corner lattice is exact for a piecewise
  // constant density.
  const auto split = [](double t, std::size_t n) {
    const std::size_t k = std::min(static_cast<std::size_t>(t), n - 1);
    return std::pair{k, t - static_cast<double>(k)};
  };
  const auto [r, fr] = split(t_row, height_);
  const auto [c, fc] = split(t_col, width_);
  const std::size_t s = width_ + 1;
  const double s00 = sums_[r * s + c], s01 = sums_[r * s + c + 1];
  const double s10 = sums_[(r + 1) * s + c], s11 = sums_[(r + 1) * s + c + 1];
  return s00 + fr * (s10 - s00) + fc * (s01 - s00) + fr * fc * (s11 - s10 - s01 + s00);
}

double IntegralImage::area_sum(double top, double left, double bottom, double right) const {
  const auto clamp = [](double v, std::size_t n) { return std::clamp(v + 0.5, 0.0, static_cast<double>(n)); };
  const double t0 = clamp(top, height_), t1 = clamp(bottom, height_);
  const double l0 = clamp(left, width_), l1 = clamp(right, width_);
  if (t1 <= t0 || l1 <= l0) return 0.0;
  const double sum = cumulative(t1, l1) - cumulative(t0, l1) - cumulative(t1, l0) + cumulative(t0, l0);
  return std::max(sum, 0.0);
}

IntegralImage integral_image(const ResponseField& field) { return IntegralImage(field); }

PixelLocation locate_center(const ResponseField& field) {
  if (field.values().empty()) throw SizeError("locate_center: empty field");
  PixelLocation best;
  double best_mag = -1.0;
  for (std::size_t r = 0; r < field.height(); ++r) {
    for (std::size_t c = 0; c < field.width(); ++c) {
      const double m = std::abs(field(r, c));
      if (m > best_mag) {
        best_mag = m;
        best = {r, c};
      }
    }
  }
  return best;
}

QuadNorms quad_responses(const IntegralImage& iu, PixelLocation center, double sigma_rows, double sigma_cols) {
  if (center.row >= iu.height() || center.col >= iu.width()) {
    throw SizeError("quad_responses: center outside the field");
  }
  const double y = static_cast<double>(center.row);
  const double x = static_cast<double>(center.col);
  const double top = y - sigma_rows, bottom = y + sigma_rows;
  const double left = x - sigma_cols, right = x + sigma_cols;

  const double lo_r = -0.5, hi_r = static_cast<double>(iu.height()) - 0.5;
  const double lo_c = -0.5, hi_c = static_cast<double>(iu.width()) - 0.5;
  QuadNorms q;
  q.degenerate = std::max(top, lo_r) >= y || std::min(bottom, hi_r) <= y || std::max(left, lo_c) >= x ||
                 std::min(right, hi_c) <= x;
  q.tl = std::sqrt(iu.area_sum(top, left, y, x));
  q.tr = std::sqrt(iu.area_sum(top, x, y, right));
  q.bl = std::sqrt(iu.area_sum(y, left, bottom, x));
  q.br = std::sqrt(iu.area_sum(y, x, bottom, right));
  return q;
}

EgfRatios engineered_features(const QuadNorms& q, double epsilon) {
  return {q.tl / (q.bl + epsilon), q.tr / (q.br + epsilon), q.tl / (q.tr + epsilon), q.bl / (q.br + epsilon)};
}

QuadTransform gabor_quad_transform(const GrayImage& img, const ParamGrid& grid, const FeatureOptions& opt) {
  QuadTransform t;
  t.params = opt.mode == OptimizeMode::FullGrid ? grid_optimize(img, grid, opt) : two_step_optimize(img, grid, opt);
  const auto kernel = make_kernel(GaborParams{t.params.sigma_x, t.params.sigma_y, 0.0, t.params.lambda}, opt.dc);
  const ResponseField field = convolve(img, kernel, opt.backend);
  const IntegralImage iu(field);
  t.center = locate_center(field);
  t.quads = quad_responses(iu, t.center, t.params.sigma_x, t.params.sigma_y);
  t.egf = engineered_features(t.quads, opt.epsilon);
  return t;
}

std::vector<FeatureRow> tabularize(const LabeledDataset& ds, const std::optional<ParamGrid>& grid,
                                   const FeatureOptions& opt) {
  ds.validate();
  if (grid) grid->validate();
  std::vector<FeatureRow> rows(ds.size());
  parallel_for(ds.size(), [&](std::size_t i) {
    const GrayImage& img = ds.images[i];
    const QuadTransform t = gabor_quad_transform(img, grid ? *grid : ParamGrid::defaults(img.width(), img.height()), opt);
    FeatureRow& row = rows[i];
    row.id = ds.names[i];
    row.label = ds.labels[i];
    row.sigma_x = t.params.sigma_x;
    row.sigma_y = t.params.sigma_y;
    row.lambda = t.params.lambda;
    row.x_star = static_cast<double>(t.center.col) / static_cast<double>(img.width());
    row.y_star = static_cast<double>(t.center.row) / static_cast<double>(img.height());
    row.q_tl = t.quads.tl;
    row.q_tr = t.quads.tr;
    row.q_bl = t.quads.bl;
    row.q_br = t.quads.br;
    row.degenerate_roi = t.quads.degenerate;
    row.egf_tl_bl = t.egf.tl_bl;
    row.egf_tr_br = t.egf.tr_br;
    row.egf_tl_tr = t.egf.tl_tr;
    row.egf_bl_br = t.egf.bl_br;
    if (opt.with_pf) row.pf = physics_features(img);
  });
  return rows;
}

}  // namespace gaborboost
