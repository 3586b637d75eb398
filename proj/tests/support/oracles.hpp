#pragma once

// Reference computations used only by tests. None of these call into the
// library code paths they are compared with.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

// Gaussian elimination with partial pivoting on a dense row-major n x n system.
inline std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

// Random symmetric positive definite matrix B B' + shift I, row-major.
inline std::vector<double> random_spd(std::size_t n, unsigned seed, double shift = 0.5) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> b(n * n), a(n * n, 0.0);
  for (auto& v : b) v = nd(gen);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) a[i * n + j] += b[i * n + k] * b[j * n + k];
      if (i == j) a[i * n + j] += shift;
    }
  return a;
}

// Physicists' Hermite polynomial by the textbook three-term recurrence, then
// the explicit normalization (2^n n! sqrt(pi))^{-1/2} e^{-x^2/2}. Fine for n <= 20, |x| <= 10.
inline double hermite_function(std::size_t n, double x) {
  double hm1 = 1.0, h = 2.0 * x;
  if (n == 0) h = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double next = 2.0 * x * h - 2.0 * static_cast<double>(k) * hm1;
    hm1 = h;
    h = next;
  }
  const double norm = std::pow(2.0, static_cast<double>(n)) * std::tgamma(static_cast<double>(n) + 1.0) *
                      std::sqrt(std::numbers::pi);
  return h * std::exp(-0.5 * x * x) / std::sqrt(norm);
}

// Trigonometric basis straight from its definition on [lo, hi].
inline double trig_function(std::size_t j, double lo, double hi, double x) {
  if (x < lo || x > hi) return 0.0;
  const double w = hi - lo;
  if (j == 1) return 1.0 / std::sqrt(w);
  const std::size_t k = j / 2;
  const double arg = 2.0 * std::numbers::pi * static_cast<double>(k) * (x - lo) / w;
  return std::sqrt(2.0 / w) * (j % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

// Adaptive Gauss-Kronrod on a finite interval.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// Exact flow of dx = -x dt.
inline double linear_decay(double x0, double t) { return x0 * std::exp(-t); }

// Poisson pmf by logs.
inline double poisson_pmf(std::size_t k, double mean) {
  return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace oracle
