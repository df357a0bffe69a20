#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "bcs/channel.hpp"
#include "bcs/nnls.hpp"
#include "bcs/special.hpp"

namespace bcs {

// Dense n x M sensing matrix with i.i.d. N(0, 1/n) entries, row-major.
// Column energy concentrates near 1.
class DenseGaussianMatrix {
 public:
  DenseGaussianMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("DenseGaussianMatrix: dimensions must be positive");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(rows)));
    for (auto& v : data_) v = normal(gen);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }

  template <class Vec>
  void matvec(const Vec& x, std::vector<double>& y) const {
    if (x.size() != cols_) throw std::invalid_argument("matvec: dimension mismatch");
    y.assign(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* row = data_.data() + r * cols_;
      double acc = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * static_cast<double>(x[c]);
      y[r] = acc;
    }
  }

  template <class Vec>
  void matvec_transpose(const Vec& r, std::vector<double>& x) const {
    if (r.size() != rows_) throw std::invalid_argument("matvec_transpose: dimension mismatch");
    x.assign(cols_, 0.0);
    for (std::size_t row = 0; row < rows_; ++row) {
      const double* rp = data_.data() + row * cols_;
      const double rv = static_cast<double>(r[row]);
      for (std::size_t c = 0; c < cols_; ++c) x[c] += rp[c] * rv;
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

template <class Vec>
Measurements measure(const DenseGaussianMatrix& a, const Vec& x, double sigma, double alpha,
                     std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("measure: sigma must be nonnegative");
  Measurements m;
  m.sigma = sigma;
  m.alpha = alpha;
  a.matvec(x, m.y);
  for (auto& v : m.y) v *= alpha;
  if (sigma > 0.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : m.y) v += sigma * normal(gen);
  }
  return m;
}

// Posterior mean of a Bernoulli(rho) coordinate observed through N(0, sigma_t^2)
// noise: f(b) = phi(lambda + (2b - 1) / (2 sigma_t^2)). Log-odds form of the
// two-Gaussian Bayes rule; stable for any b.
inline std::vector<double> amp_denoise(std::span<const double> b, double rho, double sigma_t) {
  if (!(sigma_t > 0.0)) throw std::invalid_argument("amp_denoise: sigma_t must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("amp_denoise: rho must lie in (0,1)");
  const double lambda = std::log(rho / (1.0 - rho));
  const double inv = 1.0 / (2.0 * sigma_t * sigma_t);
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    out[i] = logistic(lambda + (2.0 * b[i] - 1.0) * inv);
  return out;
}

// f'(b) = f(b) (1 - f(b)) / sigma_t^2.
inline std::vector<double> amp_denoise_derivative(std::span<const double> b, double rho,
                                                  double sigma_t) {
  std::vector<double> out = amp_denoise(b, rho, sigma_t);
  const double inv = 1.0 / (sigma_t * sigma_t);
  for (auto& f : out) f = f * (1.0 - f) * inv;
  return out;
}

// Robust effective-noise estimate: median(|r|) / Phi^{-1}(0.75), floored at 1e-12.
inline double estimate_sigma(std::span<const double> r) {
  if (r.empty()) throw std::invalid_argument("estimate_sigma: empty residual");
  static const double q75 = normal_quantile(0.75);
  std::vector<double> mag(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) mag[i] = std::abs(r[i]);
  const std::size_t mid = mag.size() / 2;
  std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(mid), mag.end());
  double median = mag[mid];
  if (mag.size() % 2 == 0) {
    const double lower = *std::max_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return std::max(median / q75, 1e-12);
}

struct AmpResult {
  std::vector<double> x_soft;
  BinarySignal x_hat;
  std::size_t iters = 0;
  bool converged = false;
  double sigma_hat = 0.0;
};

// AMP recursion from x0 = 0, r0 = 0:
//   b   = A^T r + x
//   x'  = f(b; rho, sigma_hat)          sigma_hat = median(|r|)/Phi^{-1}(0.75)
//   r'  = y - A x' + r * (1/n) sum f'(b)
// Stops early once the iterate moves less than 1e-8 in sup norm. A non-finite
// iterate is reported as a decode failure.
inline AmpResult amp_run(const DenseGaussianMatrix& a, std::span<const double> y, double rho,
                         std::size_t iters = 25) {
  if (iters < 1) throw std::invalid_argument("amp_run: iters must be >= 1");
  if (y.size() != a.rows()) throw std::invalid_argument("amp_run: dimension mismatch");
  const std::size_t m = a.cols();
  const double n = static_cast<double>(a.rows());

  AmpResult res;
  std::vector<double> x(m, 0.0), r(a.rows(), 0.0), b, ax;
  for (std::size_t t = 0; t < iters; ++t) {
    a.matvec_transpose(r, b);
    for (std::size_t i = 0; i < m; ++i) b[i] += x[i];
    res.sigma_hat = estimate_sigma(r);
    std::vector<double> xn = amp_denoise(b, rho, res.sigma_hat);
    const std::vector<double> deriv = amp_denoise_derivative(b, rho, res.sigma_hat);
    double onsager = 0.0;
    for (const double d : deriv) onsager += d;
    onsager /= n;

    double move = 0.0;
    for (std::size_t i = 0; i < m; ++i) move = std::max(move, std::abs(xn[i] - x[i]));
    x = std::move(xn);
    res.iters = t + 1;
    for (const double v : x)
      if (!std::isfinite(v)) throw std::runtime_error("amp_run: iterate diverged");
    if (move < 1e-8) {
      res.converged = true;
      break;
    }
    a.matvec(x, ax);
    for (std::size_t f = 0; f < r.size(); ++f) r[f] = y[f] - ax[f] + r[f] * onsager;
  }
  res.x_hat = round_binary(x);
  res.x_soft = std::move(x);
  return res;
}

}  // namespace bcs
