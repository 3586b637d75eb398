#include "jumpdrift/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jumpdrift/error.hpp"

namespace jumpdrift {

SymMatrix::SymMatrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
  if (data_.size() != n * n) throw ParameterError("SymMatrix: storage size must be n*n");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) data_[j * n + i] = data_[i * n + j];
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) a.set(i, i, 1.0);
  return a;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix a(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) a.set(i, i, d[i]);
  return a;
}

SymMatrix SymMatrix::leading_block(std::size_t k) const {
  if (k > n_) throw ParameterError("leading_block: size exceeds matrix dimension");
  SymMatrix b(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) b.data_[i * k + j] = data_[i * n_ + j];
  return b;
}

std::vector<double> SymMatrix::multiply(std::span<const double> v) const {
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i] += data_[i * n_ + j] * v[j];
  return out;
}

double SymMatrix::quadratic_form(std::span<const double> v) const {
  const auto av = multiply(v);
  return std::inner_product(av.begin(), av.end(), v.begin(), 0.0);
}

double SymMatrix::max_diagonal() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) m = std::max(m, data_[i * n_ + i]);
  return m;
}

std::vector<double> cholesky_solve(const SymMatrix& a, std::span<const double> rhs) {
  const std::size_t n = a.size();
  if (rhs.size() != n) throw ParameterError("cholesky_solve: rhs length mismatch");
  const double tol = kSingularPivotRatio * a.max_diagonal();
  // Lower factor L with A = L L'.
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > tol)) throw SingularMatrixError("cholesky_solve: pivot " + std::to_string(j) + " below threshold");
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  std::vector<double> y(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l[i * n + k] * y[k];
    y[i] /= l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l[k * n + i] * y[k];
    y[i] /= l[i * n + i];
  }
  return y;
}

Eigensystem jacobi_eigen(const SymMatrix& input) {
  const std::size_t n = input.size();
  std::vector<double> a = input.data();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (double x : a) scale += x * x;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-32 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p], aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });
  Eigensystem es;
  es.values.resize(n);
  es.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    es.values[k] = a[order[k] * n + order[k]];
    for (std::size_t i = 0; i < n; ++i) es.vectors[i * n + k] = v[i * n + order[k]];
  }
  return es;
}

double sym_eigen_min(const SymMatrix& a) {
  if (a.size() == 0) throw ParameterError("sym_eigen_min: empty matrix");
  return jacobi_eigen(a).values.front();
}

double inv_op_norm(const SymMatrix& a) {
  const double lmin = sym_eigen_min(a);
  if (!(lmin > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / lmin;
}

}  // namespace jumpdrift
