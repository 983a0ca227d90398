#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gaborboost {

// Row-major grayscale image with real intensities.
// Rows run top to bottom, columns left to right. Pixel (row, col) lives at
// data()[row * width() + col].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  // Throws SizeError if the data length does not match, ParameterError on
  // non-finite intensities.
  GrayImage(std::size_t width, std::size_t height, std::vector<double> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

GrayImage flip_horizontal(const GrayImage& img);

}  // namespace gaborboost
