#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace jumpdrift {

enum class BasisKind { trigonometric, hermite };

/// Orthonormal family (phi_1, ..., phi_cap) of L^2(I, dx), indexed from 1.
///
/// Trigonometric on I = [lo, hi]: phi_1 = 1/sqrt(w), phi_{2k} = sqrt(2/w) cos(2 pi k (x - lo)/w),
/// phi_{2k+1} = sqrt(2/w) sin(2 pi k (x - lo)/w), all zero outside [lo, hi], w = hi - lo.
/// Hermite on the real line: phi_j = h_{j-1}, the normalized Hermite functions.
class Basis {
 public:
  static Basis trigonometric(double lo, double hi, std::size_t max_dim = 1000);
  static Basis hermite(std::size_t max_dim = 1000);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t max_dim() const noexcept { return max_dim_; }

  // Support interval; (-inf, inf) for Hermite.
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  // Constant c_phi^2 with L(m) <= c_phi^2 * m.
  double c_phi_sq() const noexcept;

  // "trig" or "hermite".
  std::string name() const;

  double eval(std::size_t j, double x) const;

  // out[k] = phi_{k+1}(x) for k < out.size(); one shared recurrence for Hermite.
  void eval_all(double x, std::span<double> out) const;
  std::vector<double> eval_all(std::size_t m, double x) const;

  void check_dim(std::size_t m) const;

 private:
  Basis(BasisKind kind, double lo, double hi, std::size_t max_dim)
      : kind_(kind), lo_(lo), hi_(hi), max_dim_(max_dim) {}

  BasisKind kind_;
  double lo_;
  double hi_;
  std::size_t max_dim_;
};

// Parses "trig" / "hermite"; trig uses [lo, hi].
Basis make_basis(const std::string& kind, double lo, double hi, std::size_t max_dim = 1000);

// Largest admissible dimension [N*T] + 1.
std::size_t dimension_cap(std::size_t n_paths, double horizon);

struct LBound {
  std::size_t m = 0;
  double value = 1.0;
};

/// L(m) = max(1, sup_I sum_{j<=m} phi_j(x)^2).
///
/// Trigonometric with odd m uses the closed form m/w; other cases take the
/// maximum over a uniform grid of at least 1e4*m points followed by one
/// local refinement around the best node. Hermite scans [-K, K] with K past
/// the last oscillation of h_{m-1} plus a Gaussian margin.
LBound compute_L(const Basis& basis, std::size_t m);

// Composite Simpson rule on [a, b] with `intervals` (rounded up to even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals);

// Domain used for L^2(I) quadrature: I for trig, [-20, 20] for Hermite.
std::pair<double, double> quadrature_domain(const Basis& basis);

// (<f, phi_j>)_{j<=m} by composite Simpson quadrature on quadrature_domain().
std::vector<double> project_coefficients(const Basis& basis, std::size_t m,
                                         const std::function<double(double)>& f,
                                         std::size_t quadrature_n = 20000);

}  // namespace jumpdrift
