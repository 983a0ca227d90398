#include "gaborboost/gabor.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "gaborboost/errors.hpp"

namespace gaborboost {

void GaborParams::validate() const {
  if (!std::isfinite(sigma_x) || !std::isfinite(sigma_y) || sigma_x <= 0.0 || sigma_y <= 0.0) {
    throw ParameterError("GaborParams: sigmas must be positive and finite");
  }
  if (!std::isfinite(theta) || !std::isfinite(lambda)) {
    throw ParameterError("GaborParams: theta and lambda must be finite");
  }
}

ComplexKernel::ComplexKernel(int half_x, int half_y, std::vector<Complex> row_factor,
                             std::vector<Complex> col_factor, double dc_offset)
    : half_x_(half_x),
      half_y_(half_y),
      row_factor_(std::move(row_factor)),
      col_factor_(std::move(col_factor)),
      dc_offset_(dc_offset) {
  if (half_x_ < 0 || half_y_ < 0 || row_factor_.size() != rows() || col_factor_.size() != cols()) {
    throw SizeError("ComplexKernel: factor lengths do not match the support");
  }
  values_.resize(rows() * cols());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      values_[r * cols() + c] = row_factor_[r] * col_factor_[c] - dc_offset_;
    }
  }
}

ComplexKernel make_kernel(const GaborParams& p, bool dc_correct) {
  return make_kernel(p, dc_correct ? DcCorrection::Global : DcCorrection::None);
}

ComplexKernel make_kernel(const GaborParams& p, DcCorrection dc_mode) {
  p.validate();
  const int hx = static_cast<int>(std::ceil(3.0 * p.sigma_x));
  const int hy = static_cast<int>(std::ceil(3.0 * p.sigma_y));
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * p.sigma_x * p.sigma_y);
  const double kx = p.lambda * std::sin(p.theta);
  const double ky = p.lambda * std::cos(p.theta);

  std::vector<Complex> row(2 * hx + 1), col(2 * hy + 1);
  for (int x = -hx; x <= hx; ++x) {
    const double g = norm * std::exp(-(x * x) / (2.0 * p.sigma_x * p.sigma_x));
    row[x + hx] = std::polar(g, kx * x);
  }
  for (int y = -hy; y <= hy; ++y) {
    const double g = std::exp(-(y * y) / (2.0 * p.sigma_y * p.sigma_y));
    col[y + hy] = std::polar(g, ky * y);
  }

  double dc = 0.0;
  if (dc_mode == DcCorrection::Axis) {
    auto& carrier = std::abs(ky) >= std::abs(kx) ? col : row;
    double mean = 0.0;
    for (const auto& v : carrier) mean += v.real();
    mean /= static_cast<double>(carrier.size());
    for (auto& v : carrier) v -= mean;
  } else if (dc_mode == DcCorrection::Global) {
    double sum = 0.0;
    for (const auto& a : row) {
      for (const auto& b : col) sum += (a * b).real();
    }
    dc = sum / static_cast<double>(row.size() * col.size());
  }
  return ComplexKernel(hx, hy, std::move(row), std::move(col), dc);
}

ResponseField::ResponseField(std::size_t width, std::size_t height, std::vector<Complex> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width_ * height_) throw SizeError("ResponseField: size mismatch");
}

std::vector<double> ResponseField::magnitude() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::abs(values_[i]);
  return out;
}

double ResponseField::squared_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s;
}

std::size_t reflect_index(long i, std::size_t n) {
  if (n == 1) return 0;
  const long period = 2 * static_cast<long>(n - 1);
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < static_cast<long>(n) ? m : period - m);
}

namespace {

struct Padded {
  std::size_t rows, cols;
  std::vector<double> values;
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

Padded reflect_pad(const GrayImage& img, int pad_rows, int pad_cols) {
  Padded p{img.height() + 2 * pad_rows, img.width() + 2 * pad_cols, {}};
  p.values.resize(p.rows * p.cols);
  for (std::size_t r = 0; r < p.rows; ++r) {
    const std::size_t sr = reflect_index(static_cast<long>(r) - pad_rows, img.height());
    for (std::size_t c = 0; c < p.cols; ++c) {
      p.values[r * p.cols + c] = img(sr, reflect_index(static_cast<long>(c) - pad_cols, img.width()));
    }
  }
  return p;
}

std::vector<Complex> convolve_direct(const GrayImage& img, const ComplexKernel& k) {
  const Padded p = reflect_pad(img, k.half_x(), k.half_y());
  const int hx = k.half_x(), hy = k.half_y();
  std::vector<Complex> out(img.size());
  for (std::size_t i = 0; i < img.height(); ++i) {
    for (std::size_t j = 0; j < img.width(); ++j) {
      Complex acc = 0.0;
      // u(i - dr, j - dc) sits at padded (i - dr + hx, j - dc + hy).
      for (int dr = -hx; dr <= hx; ++dr) {
        const std::size_t pr = i - dr + hx;
        for (int dc = -hy; dc <= hy; ++dc) acc += k.at(dr, dc) * p(pr, j - dc + hy);
      }
      out[i * img.width() + j] = acc;
    }
  }
  return out;
}

std::vector<Complex> convolve_separable(const GrayImage& img, const ComplexKernel& k) {
  const int hx = k.half_x(), hy = k.half_y();
  const Padded p = reflect_pad(img, hx, hy);
  const std::size_t h = img.height(), w = img.width();
  const auto a = k.row_factor();
  const auto b = k.col_factor();

  bool a_real = true;
  for (const auto& v : a) a_real = a_real && v.imag() == 0.0;

  // Vertical pass over padded columns: v(i, pc) = sum_dr a(dr) p(i - dr + hx, pc).
  std::vector<Complex> vert(h * p.cols);
  if (a_real) {
    std::vector<double> acc(p.cols);
    for (std::size_t i = 0; i < h; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int dr = -hx; dr <= hx; ++dr) {
        const double coef = a[dr + hx].real();
        const double* src = &p.values[(i - dr + hx) * p.cols];
        for (std::size_t c = 0; c < p.cols; ++c) acc[c] += coef * src[c];
      }
      for (std::size_t c = 0; c < p.cols; ++c) vert[i * p.cols + c] = acc[c];
    }
  } else {
    for (std::size_t i = 0; i < h; ++i) {
      Complex* dst = &vert[i * p.cols];
      for (int dr = -hx; dr <= hx; ++dr) {
        const Complex coef = a[dr + hx];
        const double* src = &p.values[(i - dr + hx) * p.cols];
        for (std::size_t c = 0; c < p.cols; ++c) dst[c] += coef * src[c];
      }
    }
  }

  // Horizontal pass: out(i, j) = sum_dc b(dc) v(i, j - dc + hy).
  std::vector<Complex> out(h * w);
  for (std::size_t i = 0; i < h; ++i) {
    const Complex* src = &vert[i * p.cols];
    for (std::size_t j = 0; j < w; ++j) {
      double re = 0.0, im = 0.0;
      for (int dc = -hy; dc <= hy; ++dc) {
        const Complex s = src[j - dc + hy];
        const Complex coef = b[dc + hy];
        re += coef.real() * s.real() - coef.imag() * s.imag();
        im += coef.real() * s.imag() + coef.imag() * s.real();
      }
      out[i * w + j] = Complex(re, im);
    }
  }

  if (k.dc_offset() != 0.0) {
    // Box sums of the padded window rows [i, i + 2hx], cols [j, j + 2hy].
    std::vector<double> sat((p.rows + 1) * (p.cols + 1), 0.0);
    const std::size_t sc = p.cols + 1;
    for (std::size_t r = 0; r < p.rows; ++r) {
      double run = 0.0;
      for (std::size_t c = 0; c < p.cols; ++c) {
        run += p(r, c);
        sat[(r + 1) * sc + c + 1] = sat[r * sc + c + 1] + run;
      }
    }
    const std::size_t kr = k.rows(), kc = k.cols();
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        const double box = sat[(i + kr) * sc + j + kc] - sat[i * sc + j + kc] - sat[(i + kr) * sc + j] +
                           sat[i * sc + j];
        out[i * w + j] -= k.dc_offset() * box;
      }
    }
  }
  return out;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}

struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

// The FFTW planner is not thread-safe; execution with new-array calls is.
PlanPair plans_for(int n0, int n1) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({n0, n1});
  if (it != cache.end()) return it->second;
  auto scratch = fftw_buffer(static_cast<std::size_t>(n0) * n1);
  PlanPair plans{fftw_plan_dft_2d(n0, n1, scratch.get(), scratch.get(), FFTW_FORWARD, FFTW_ESTIMATE),
                 fftw_plan_dft_2d(n0, n1, scratch.get(), scratch.get(), FFTW_BACKWARD, FFTW_ESTIMATE)};
  cache.emplace(std::make_pair(n0, n1), plans);
  return plans;
}

std::vector<Complex> convolve_fft(const GrayImage& img, const ComplexKernel& k) {
  const int hx = k.half_x(), hy = k.half_y();
  const Padded p = reflect_pad(img, hx, hy);
  // Linear convolution of the padded image with the kernel fits without wrap.
  const std::size_t n0 = p.rows + k.rows() - 1, n1 = p.cols + k.cols() - 1, n = n0 * n1;
  const PlanPair plans = plans_for(static_cast<int>(n0), static_cast<int>(n1));

  auto image = fftw_buffer(n);
  auto kernel = fftw_buffer(n);
  for (std::size_t i = 0; i < n; ++i) {
    image[i][0] = image[i][1] = 0.0;
    kernel[i][0] = kernel[i][1] = 0.0;
  }
  for (std::size_t r = 0; r < p.rows; ++r) {
    for (std::size_t c = 0; c < p.cols; ++c) image[r * n1 + c][0] = p(r, c);
  }
  for (std::size_t r = 0; r < k.rows(); ++r) {
    for (std::size_t c = 0; c < k.cols(); ++c) {
      const Complex v = k.values()[r * k.cols() + c];
      kernel[r * n1 + c][0] = v.real();
      kernel[r * n1 + c][1] = v.imag();
    }
  }
  fftw_execute_dft(plans.forward, image.get(), image.get());
  fftw_execute_dft(plans.forward, kernel.get(), kernel.get());
  for (std::size_t i = 0; i < n; ++i) {
    const double re = image[i][0] * kernel[i][0] - image[i][1] * kernel[i][1];
    const double im = image[i][0] * kernel[i][1] + image[i][1] * kernel[i][0];
    image[i][0] = re;
    image[i][1] = im;
  }
  fftw_execute_dft(plans.backward, image.get(), image.get());

  const double scale = 1.0 / static_cast<double>(n);
  std::vector<Complex> out(img.size());
  for (std::size_t i = 0; i < img.height(); ++i) {
    for (std::size_t j = 0; j < img.width(); ++j) {
      const auto& v = image[(i + 2 * hx) * n1 + j + 2 * hy];
      out[i * img.width() + j] = Complex(v[0] * scale, v[1] * scale);
    }
  }
  return out;
}

}  // namespace

ResponseField convolve(const GrayImage& img, const ComplexKernel& k, ConvolutionBackend backend) {
  if (img.empty()) throw SizeError("convolve: empty image");
  if (k.rows() > 3 * img.height() || k.cols() > 3 * img.width()) {
    throw SizeError("convolve: kernel " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                    " exceeds three times the image extent " + std::to_string(img.height()) + "x" +
                    std::to_string(img.width()));
  }
  std::vector<Complex> values;
  switch (backend) {
    case ConvolutionBackend::Direct:
      values = convolve_direct(img, k);
      break;
    case ConvolutionBackend::Separable:
      values = convolve_separable(img, k);
      break;
    case ConvolutionBackend::Fft:
      values = convolve_fft(img, k);
      break;
  }
  return ResponseField(img.width(), img.height(), std::move(values));
}

double response_norm(const GrayImage& img, const GaborParams& p, DcCorrection dc, ConvolutionBackend backend) {
  return std::sqrt(convolve(img, make_kernel(p, dc), backend).squared_norm());
}

}  // namespace gaborboost
