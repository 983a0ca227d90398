#include "gaborboost/physfit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaborboost/errors.hpp"

namespace gaborboost {

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

struct Model {
  double value;
  Eigen::Matrix<double, 5, 1> grad;  // d/d(amp, center, width, skew, offset)
};

Model evaluate(double x, const PfParams& p) {
  const double xi = (x - p.center) / p.width;
  const double e = std::exp(-0.5 * xi * xi);
  const double ricker = (1.0 - xi * xi) * e;
  const double dricker = e * xi * (xi * xi - 3.0);
  const double s = 1.0 + p.skew * xi;
  const double dm_dxi = -p.amp * (dricker * s + ricker * p.skew);

  Model m;
  m.value = p.offset - p.amp * ricker * s;
  m.grad << -ricker * s, -dm_dxi / p.width, -dm_dxi * xi / p.width, -p.amp * ricker * xi, 1.0;
  return m;
}

double cost_of(std::span<const double> profile, const PfParams& p) {
  double c = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double r = profile[i] - mexican_hat(static_cast<double>(i), p);
    c += r * r;
  }
  return c;
}

PfParams from_vector(const Eigen::Matrix<double, 5, 1>& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

Eigen::Matrix<double, 5, 1> to_vector(const PfParams& p) {
  Eigen::Matrix<double, 5, 1> v;
  v << p.amp, p.center, p.width, p.skew, p.offset;
  return v;
}

bool finite(const PfParams& p) {
  return std::isfinite(p.amp) && std::isfinite(p.center) && std::isfinite(p.width) && std::isfinite(p.skew) &&
         std::isfinite(p.offset);
}

}  // namespace

std::vector<double> project(const GrayImage& img, Background background) {
  const std::size_t w = img.width();
  std::vector<double> profile(w, 0.0);
  for (std::size_t r = 0; r < img.height(); ++r) {
    const auto row = img.row(r);
    for (std::size_t c = 0; c < w; ++c) profile[c] += row[c];
  }
  for (double& v : profile) v /= static_cast<double>(img.height());
  if (background == Background::None) return profile;

  std::size_t window = std::max<std::size_t>(3, w / 4);
  if (window % 2 == 0) ++window;
  const std::size_t half = window / 2;
  std::vector<double> out(w);
  for (std::size_t c = 0; c < w; ++c) {
    const std::size_t lo = c >= half ? c - half : 0;
    const std::size_t hi = std::min(w, c + half + 1);
    out[c] = profile[c] - median(std::vector<double>(profile.begin() + lo, profile.begin() + hi));
  }
  return out;
}

double mexican_hat(double x, const PfParams& p) {
  const double xi = (x - p.center) / p.width;
  return p.offset - p.amp * (1.0 - xi * xi) * std::exp(-0.5 * xi * xi) * (1.0 + p.skew * xi);
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::Diverged: return "diverged";
    case FitStatus::WidthCollapse: return "width_collapse";
    case FitStatus::BelowNoiseFloor: return "below_noise_floor";
  }
  return "unknown";
}

PfParams auto_init(std::span<const double> profile) {
  const std::size_t n = profile.size();
  const std::size_t imin = static_cast<std::size_t>(std::min_element(profile.begin(), profile.end()) - profile.begin());

  PfParams p;
  p.offset = median(std::vector<double>(profile.begin(), profile.end()));
  p.amp = p.offset - profile[imin];
  p.center = static_cast<double>(imin);
  p.skew = 0.0;

  // Walk uphill from the minimum to the first local maximum on each side.
  std::size_t left = imin, right = imin;
  while (left > 0 && profile[left - 1] >= profile[left]) --left;
  while (right + 1 < n && profile[right + 1] >= profile[right]) ++right;
  const bool has_shoulders = left > 0 && right + 1 < n && left < imin && right > imin;
  p.width = has_shoulders ? 0.5 * static_cast<double>(right - left) : static_cast<double>(n) / 8.0;
  return p;
}

double profile_noise(std::span<const double> profile) {
  if (profile.size() < 3) return 0.0;
  std::vector<double> diffs(profile.size() - 1);
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) diffs[i] = profile[i + 1] - profile[i];
  const double m = median(diffs);
  for (double& d : diffs) d = std::abs(d - m);
  return 1.4826 * median(diffs) / std::sqrt(2.0);
}

PfFit fit_mexican_hat(std::span<const double> profile, const std::optional<PfParams>& init) {
  if (profile.size() < 8) throw ParameterError("fit_mexican_hat: profile needs at least 8 samples");
  for (double v : profile) {
    if (!std::isfinite(v)) throw ParameterError("fit_mexican_hat: non-finite profile value");
  }

  constexpr int kMaxIterations = 200;
  constexpr double kRelTolerance = 1e-10;
  constexpr double kMinWidth = 1.0;

  PfFit fit;
  fit.params = init ? *init : auto_init(profile);
  fit.noise_floor = 3.0 * profile_noise(profile);
  if (!finite(fit.params) || fit.params.width <= 0.0) throw ParameterError("fit_mexican_hat: invalid initial parameters");

  double scale = 0.0;
  for (double v : profile) scale += v * v;
  const double cost_floor = 1e-30 * std::max(scale, 1.0);

  double cost = cost_of(profile, fit.params);
  fit.accepted_costs.push_back(cost);
  double damping = 1e-3;
  fit.status = FitStatus::MaxIterations;

  for (fit.iterations = 0; fit.iterations < kMaxIterations; ++fit.iterations) {
    if (cost <= cost_floor) {
      fit.status = FitStatus::Converged;
      break;
    }
    Eigen::Matrix<double, 5, 5> jtj = Eigen::Matrix<double, 5, 5>::Zero();
    Eigen::Matrix<double, 5, 1> jtr = Eigen::Matrix<double, 5, 1>::Zero();
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const Model m = evaluate(static_cast<double>(i), fit.params);
      jtj.noalias() += m.grad * m.grad.transpose();
      jtr.noalias() += m.grad * (profile[i] - m.value);
    }

    Eigen::Matrix<double, 5, 5> lhs = jtj;
    for (int d = 0; d < 5; ++d) lhs(d, d) += damping * std::max(jtj(d, d), 1e-12);
    const Eigen::Matrix<double, 5, 1> step = lhs.ldlt().solve(jtr);
    const PfParams candidate = from_vector(to_vector(fit.params) + step);

    const double new_cost = finite(candidate) && candidate.width > 0.0 ? cost_of(profile, candidate)
                                                                       : std::numeric_limits<double>::infinity();
    if (new_cost < cost) {
      const double rel = (cost - new_cost) / cost;
      fit.params = candidate;
      cost = new_cost;
      fit.accepted_costs.push_back(cost);
      damping = std::max(damping / 3.0, 1e-12);
      if (fit.params.width < kMinWidth) {
        fit.status = FitStatus::WidthCollapse;
        break;
      }
      if (rel < kRelTolerance) {
        fit.status = FitStatus::Converged;
        break;
      }
    } else {
      damping *= 10.0;
      if (damping > 1e12) {
        // No descent direction left at machine precision.
        fit.status = FitStatus::Converged;
        break;
      }
    }
  }

  if (!finite(fit.params) || !std::isfinite(cost)) {
    fit.status = FitStatus::Diverged;
  } else if (fit.ok() && fit.params.width < kMinWidth) {
    fit.status = FitStatus::WidthCollapse;
  } else if (fit.ok() && fit.params.amp <= fit.noise_floor) {
    fit.status = FitStatus::BelowNoiseFloor;
  }
  fit.residual_norm = std::sqrt(cost);
  return fit;
}

PfParams physics_features(const GrayImage& img) {
  const auto profile = project(img, Background::MedianColumns);
  if (profile.size() < 8) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan, nan};
  }
  const PfFit fit = fit_mexican_hat(profile);
  if (!fit.ok()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan, nan};
  }
  return fit.params;
}

}  // namespace gaborboost
