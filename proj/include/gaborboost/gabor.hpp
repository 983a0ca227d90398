#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "gaborboost/image.hpp"

namespace gaborboost {

using Complex = std::complex<double>;

// Kernel parameters. The kernel's x axis runs along image rows (vertical)
// and its y axis along image columns, so theta = 0 oscillates
// horizontally. lambda is an angular frequency in radians per pixel.
struct GaborParams {
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double theta = 0.0;
  double lambda = 0.0;

  // Throws ParameterError unless both sigmas are positive and finite and
  // theta, lambda are finite.
  void validate() const;
};

// Complex Gabor kernel sampled on the integer lattice
// [-half_x, half_x] x [-half_y, half_y] (row offset, column offset).
// The kernel factors as row_factor(dr) * col_factor(dc) - dc_offset, where
// dc_offset is the real-part mean removed by DC correction (0 otherwise).
class ComplexKernel {
 public:
  ComplexKernel(int half_x, int half_y, std::vector<Complex> row_factor, std::vector<Complex> col_factor,
                double dc_offset);

  int half_x() const { return half_x_; }
  int half_y() const { return half_y_; }
  std::size_t rows() const { return static_cast<std::size_t>(2 * half_x_ + 1); }
  std::size_t cols() const { return static_cast<std::size_t>(2 * half_y_ + 1); }

  // Value at row offset dr, column offset dc.
  Complex at(int dr, int dc) const { return values_[(dr + half_x_) * cols() + (dc + half_y_)]; }
  std::span<const Complex> values() const { return values_; }

  std::span<const Complex> row_factor() const { return row_factor_; }
  std::span<const Complex> col_factor() const { return col_factor_; }
  double dc_offset() const { return dc_offset_; }

 private:
  int half_x_;
  int half_y_;
  std::vector<Complex> row_factor_;
  std::vector<Complex> col_factor_;
  double dc_offset_;
  std::vector<Complex> values_;
};

// How the kernel's response to flat intensity is removed.
enum class DcCorrection {
  None,
  // Subtract the mean of the real part over the whole support.
  Global,
  // Subtract its real mean from the factor carrying the plane wave (the
  // column factor when |cos theta| >= |sin theta|). Every line along that
  // axis then sums to zero, so structure that is constant along the
  // oscillation axis gives no response.
  Axis,
};

// G(x, y) = 1/(sqrt(2 pi) sx sy) exp(-(x^2/2sx^2 + y^2/2sy^2)) exp(i lambda (x sin t + y cos t)),
// truncated at ceil(3 sigma) per axis.
ComplexKernel make_kernel(const GaborParams& p, DcCorrection dc);
// dc_correct = true selects DcCorrection::Global.
ComplexKernel make_kernel(const GaborParams& p, bool dc_correct);

// Complex response of a same-size convolution.
class ResponseField {
 public:
  ResponseField() = default;
  ResponseField(std::size_t width, std::size_t height, std::vector<Complex> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  Complex operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  std::span<const Complex> values() const { return values_; }

  std::vector<double> magnitude() const;
  double squared_norm() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Complex> values_;
};

enum class ConvolutionBackend {
  Direct,     // full 2D spatial sum
  Separable,  // two 1D passes plus a box term for the DC offset
  Fft,        // FFTW on the reflect-padded image
};

// Same-size convolution (G * u)(i, j) = sum G(dr, dc) u(i - dr, j - dc) with
// reflect-101 padding. Throws SizeError when the kernel exceeds three times
// the image extent along either axis, or for an empty image.
ResponseField convolve(const GrayImage& img, const ComplexKernel& k,
                       ConvolutionBackend backend = ConvolutionBackend::Separable);

// l2 norm of |G * u| over the whole field.
double response_norm(const GrayImage& img, const GaborParams& p, DcCorrection dc = DcCorrection::Axis,
                     ConvolutionBackend backend = ConvolutionBackend::Separable);

// Maps any integer index onto [0, n) by reflection without repeating the
// edge sample (… 2 1 | 0 1 2 … n-1 | n-2 …).
std::size_t reflect_index(long i, std::size_t n);

}  // namespace gaborboost
