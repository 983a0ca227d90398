#include "gaborboost/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gaborboost/errors.hpp"

namespace gaborboost {

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), data_(width * height, fill) {
  if (!std::isfinite(fill)) throw ParameterError("GrayImage: non-finite fill value");
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width_ * height_) {
    throw SizeError("GrayImage: data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(width_) + "x" + std::to_string(height_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ParameterError("GrayImage: non-finite intensity at index " + std::to_string(i));
    }
  }
}

GrayImage flip_horizontal(const GrayImage& img) {
  GrayImage out = img;
  auto d = out.data();
  for (std::size_t r = 0; r < img.height(); ++r) {
    std::reverse(d.begin() + r * img.width(), d.begin() + (r + 1) * img.width());
  }
  return out;
}

}  // namespace gaborboost
