#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jumpdrift {

/// Dense symmetric matrix. The upper triangle is authoritative: construction
/// from full storage mirrors it into the lower triangle.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  SymMatrix(std::size_t n, std::vector<double> row_major);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

  // Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }

  SymMatrix leading_block(std::size_t k) const;
  std::vector<double> multiply(std::span<const double> v) const;
  double quadratic_form(std::span<const double> v) const;
  double max_diagonal() const noexcept;
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Pivots below this fraction of the largest diagonal entry are singular.
inline constexpr double kSingularPivotRatio = 1e-12;

// Solves A x = rhs by Cholesky; throws SingularMatrixError on a small pivot.
std::vector<double> cholesky_solve(const SymMatrix& a, std::span<const double> rhs);

struct Eigensystem {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column k (row-major n x n) pairs with values[k]
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
Eigensystem jacobi_eigen(const SymMatrix& a);

double sym_eigen_min(const SymMatrix& a);

// 1 / lambda_min(A), or +infinity when lambda_min <= 0.
double inv_op_norm(const SymMatrix& a);

}  // namespace jumpdrift
