#include "gaborboost/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "gaborboost/errors.hpp"
#include "gaborboost/parallel.hpp"

namespace gaborboost {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double ricker(double xi) { return (1.0 - xi * xi) * std::exp(-0.5 * xi * xi); }

struct Drawn {
  GrayImage image;
  GroundTruth truth;
};

Drawn draw(const SynthSpec& spec, const std::string& label, std::size_t index) {
  std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index + 1)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double w = static_cast<double>(spec.width);
  const double h = static_cast<double>(spec.height);
  const int dip_col = static_cast<int>(std::floor(uniform(0.4, 0.6) * w));
  const double cy = 0.5 * (h - 1.0);
  const double rx = uniform(0.9, 1.2) * w;
  const double ry = uniform(0.9, 1.2) * h;
  const double depth = uniform(0.5, 0.8);
  const double dip_width = uniform(2.5, 4.5);
  constexpr double kPeak = 0.8;

  const bool partial = label == kPartial;
  const bool vortex = label == kVortex;
  // Partial: depth fades out around cut_row with a 2-pixel logistic edge.
  const double cut_row = partial ? cy - uniform(0.0, 0.1) * h : h;
  const double contrast = vortex ? uniform(0.5, 0.8) : 0.0;
  // Vortex halves are displaced horizontally in opposite directions.
  const double shift = vortex ? uniform(1.0, 2.0) : 0.0;

  GrayImage img(spec.width, spec.height);
  for (std::size_t r = 0; r < spec.height; ++r) {
    const double dr = (static_cast<double>(r) - cy) / ry;
    const double window = partial ? 1.0 / (1.0 + std::exp((static_cast<double>(r) - cut_row) / 2.0)) : 1.0;
    // Negative above the middle, positive below: favours the left shoulder
    // on top and the right shoulder at the bottom.
    const double flip = std::tanh((static_cast<double>(r) - cy) / 1.5);
    const double skew = contrast * flip;
    const double center = dip_col + shift * flip;
    // The lower vortex half is slightly deeper, which keeps the response
    // maximum below the twist.
    const double boost = vortex ? 1.0 + 0.075 * (flip + 1.0) : 1.0;
    for (std::size_t c = 0; c < spec.width; ++c) {
      const double dc = (static_cast<double>(c) - dip_col) / rx;
      const double cloud = kPeak * std::max(0.0, 1.0 - dc * dc - dr * dr);
      const double xi = (static_cast<double>(c) - center) / dip_width;
      const double dip = depth * boost * window * ricker(xi) * (1.0 + skew * std::tanh(xi));
      img(r, c) = cloud * (1.0 - dip);
    }
  }
  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (double& v : img.data()) v += noise(rng);
  }

  GroundTruth t;
  t.label = label;
  t.dip_column = dip_col;
  t.extent_top = 0;
  t.extent_bottom = partial ? static_cast<int>(std::floor(cut_row)) : static_cast<int>(spec.height) - 1;
  t.asymmetry_sign = vortex ? 1 : 0;
  return {std::move(img), std::move(t)};
}

}  // namespace

void SynthSpec::validate() const {
  if (width == 0 || height == 0) throw ConfigError("SynthSpec: width and height must be positive");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw ConfigError("SynthSpec: noise_sigma must be >= 0");
}

SynthDataset generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<std::string> labels;
  labels.insert(labels.end(), spec.longitudinal, kLongitudinal);
  labels.insert(labels.end(), spec.partial, kPartial);
  labels.insert(labels.end(), spec.vortex, kVortex);

  std::vector<Drawn> drawn(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) { drawn[i] = draw(spec, labels[i], i); });

  SynthDataset out;
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%05zu.pgm", i);
    drawn[i].truth.name = name;
    out.data.images.push_back(std::move(drawn[i].image));
    out.data.labels.push_back(labels[i]);
    out.data.names.push_back(name);
    out.truth.push_back(std::move(drawn[i].truth));
  }
  return out;
}

void write_ground_truth(const std::vector<GroundTruth>& truth, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << "filename,label,dip_column,extent_top,extent_bottom,asymmetry_sign\n";
  for (const auto& t : truth) {
    out << t.name << "," << t.label << "," << t.dip_column << "," << t.extent_top << "," << t.extent_bottom << ","
        << t.asymmetry_sign << "\n";
  }
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace gaborboost
