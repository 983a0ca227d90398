#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gaborboost/feature_row.hpp"
#include "gaborboost/image.hpp"

namespace gaborboost {

enum class Background { MedianColumns, None };

// Column-wise mean over rows. With MedianColumns a running median of the
// profile (window width/4 rounded up to odd, at least 3, shrinking at the
// ends) is subtracted as the background.
std::vector<double> project(const GrayImage& img, Background background = Background::MedianColumns);

// m(x) = offset - amp (1 - xi^2) exp(-xi^2 / 2) (1 + skew xi),  xi = (x - center) / width.
double mexican_hat(double x, const PfParams& p);

enum class FitStatus {
  Converged,
  MaxIterations,   // stopped at the iteration cap; parameters are usable
  Diverged,        // non-finite cost or parameters
  WidthCollapse,   // width fell below one sample
  BelowNoiseFloor  // amp under three times the profile noise estimate
};

std::string_view to_string(FitStatus s);

struct PfFit {
  PfParams params;
  double residual_norm = 0.0;
  FitStatus status = FitStatus::Converged;
  int iterations = 0;
  // Cost (sum of squared residuals) after each accepted step, starting with
  // the initial guess.
  std::vector<double> accepted_costs;
  double noise_floor = 0.0;

  bool ok() const { return status == FitStatus::Converged || status == FitStatus::MaxIterations; }
};

// Derivative-free seed: center at the profile minimum, offset at the
// median, amp = offset - min, width half the distance between the shoulder
// maxima around the minimum (length/8 when no shoulders are found), skew 0.
PfParams auto_init(std::span<const double> profile);

// Robust noise level of a profile: MAD of first differences / sqrt(2).
double profile_noise(std::span<const double> profile);

// Levenberg-damped Gauss-Newton least squares of mexican_hat against the
// profile (sample x at index x). Throws ParameterError for profiles shorter
// than 8 samples or with non-finite values.
PfFit fit_mexican_hat(std::span<const double> profile, const std::optional<PfParams>& init = std::nullopt);

// Projection plus fit; failed fits yield all-NaN parameters.
PfParams physics_features(const GrayImage& img);

}  // namespace gaborboost
