#include "jumpdrift/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "jumpdrift/error.hpp"

namespace jumpdrift {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kHermiteH0Scale = std::pow(std::numbers::pi, -0.25);

double sum_of_squares(const Basis& basis, std::size_t m, double x, std::vector<double>& buf) {
  basis.eval_all(x, buf);
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) s += buf[k] * buf[k];
  return s;
}

}  // namespace

Basis Basis::trigonometric(double lo, double hi, std::size_t max_dim) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ParameterError("trig basis requires finite lo < hi");
  if (max_dim < 1) throw ParameterError("basis dimension cap must be >= 1");
  return Basis(BasisKind::trigonometric, lo, hi, max_dim);
}

Basis Basis::hermite(std::size_t max_dim) {
  if (max_dim < 1) throw ParameterError("basis dimension cap must be >= 1");
  const double inf = std::numeric_limits<double>::infinity();
  return Basis(BasisKind::hermite, -inf, inf, max_dim);
}

Basis make_basis(const std::string& kind, double lo, double hi, std::size_t max_dim) {
  if (kind == "trig") return Basis::trigonometric(lo, hi, max_dim);
  if (kind == "hermite") return Basis::hermite(max_dim);
  throw ParameterError("unknown basis '" + kind + "' (expected trig or hermite)");
}

std::size_t dimension_cap(std::size_t n_paths, double horizon) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n_paths) * horizon)) + 1;
}

double Basis::c_phi_sq() const noexcept {
  if (kind_ == BasisKind::hermite) return 1.0;
  return std::max(1.0, 2.0 / (hi_ - lo_));
}

std::string Basis::name() const { return kind_ == BasisKind::hermite ? "hermite" : "trig"; }

void Basis::check_dim(std::size_t m) const {
  if (m < 1 || m > max_dim_) {
    throw ParameterError("basis index " + std::to_string(m) + " outside 1.." + std::to_string(max_dim_));
  }
}

double Basis::eval(std::size_t j, double x) const {
  check_dim(j);
  if (kind_ == BasisKind::trigonometric) {
    if (x < lo_ || x > hi_) return 0.0;
    const double w = hi_ - lo_;
    if (j == 1) return std::sqrt(1.0 / w);
    const double k = static_cast<double>(j / 2);
    const double arg = kTwoPi * k * (x - lo_) / w;
    return std::sqrt(2.0 / w) * (j % 2 == 0 ? std::cos(arg) : std::sin(arg));
  }
  std::vector<double> h(j);
  eval_all(x, h);
  return h[j - 1];
}

void Basis::eval_all(double x, std::span<double> out) const {
  const std::size_t m = out.size();
  if (m == 0) return;
  check_dim(m);
  if (kind_ == BasisKind::trigonometric) {
    if (x < lo_ || x > hi_) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double w = hi_ - lo_;
    const double amp = std::sqrt(2.0 / w);
    out[0] = std::sqrt(1.0 / w);
    const double base = kTwoPi * (x - lo_) / w;
    for (std::size_t j = 2; j <= m; ++j) {
      const double arg = base * static_cast<double>(j / 2);
      out[j - 1] = amp * (j % 2 == 0 ? std::cos(arg) : std::sin(arg));
    }
    return;
  }
  // h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}
  out[0] = kHermiteH0Scale * std::exp(-0.5 * x * x);
  if (m > 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double kd = static_cast<double>(k);
    out[k + 1] = std::sqrt(2.0 / (kd + 1.0)) * x * out[k] - std::sqrt(kd / (kd + 1.0)) * out[k - 1];
  }
}

std::vector<double> Basis::eval_all(std::size_t m, double x) const {
  std::vector<double> out(m);
  eval_all(x, out);
  return out;
}

LBound compute_L(const Basis& basis, std::size_t m) {
  basis.check_dim(m);
  if (basis.kind() == BasisKind::trigonometric && m % 2 == 1) {
    return {m, std::max(1.0, static_cast<double>(m) / (basis.hi() - basis.lo()))};
  }
  double lo = basis.lo(), hi = basis.hi();
  if (basis.kind() == BasisKind::hermite) {
    hi = std::sqrt(2.0 * static_cast<double>(m) + 1.0) + 8.0;
    lo = -hi;
  }
  const std::size_t points = std::max<std::size_t>(10000 * m, 10000);
  std::vector<double> buf(m);
  double best = -1.0, best_x = lo;
  const double h = (hi - lo) / static_cast<double>(points);
  for (std::size_t i = 0; i <= points; ++i) {
    const double x = i == points ? hi : lo + h * static_cast<double>(i);
    const double s = sum_of_squares(basis, m, x, buf);
    if (s > best) {
      best = s;
      best_x = x;
    }
  }
  // One refinement pass over the two cells around the best node.
  constexpr std::size_t kRefine = 2000;
  const double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  for (std::size_t i = 0; i <= kRefine; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(kRefine);
    best = std::max(best, sum_of_squares(basis, m, x, buf));
  }
  return {m, std::max(1.0, best)};
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t intervals) {
  const std::size_t n = std::max<std::size_t>(2, intervals + intervals % 2);
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  const double r = s * h / 3.0;
  if (!std::isfinite(r)) throw NumericError("quadrature produced a non-finite value");
  return r;
}

std::pair<double, double> quadrature_domain(const Basis& basis) {
  if (basis.kind() == BasisKind::hermite) return {-20.0, 20.0};
  return {basis.lo(), basis.hi()};
}

std::vector<double> project_coefficients(const Basis& basis, std::size_t m, const std::function<double(double)>& f,
                                         std::size_t quadrature_n) {
  basis.check_dim(m);
  const auto [a, b] = quadrature_domain(basis);
  const std::size_t n = std::max<std::size_t>(2, quadrature_n + quadrature_n % 2);
  const double h = (b - a) / static_cast<double>(n);
  std::vector<double> coef(m, 0.0), phi(m);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = i == n ? b : a + h * static_cast<double>(i);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double fx = f(x);
    basis.eval_all(x, phi);
    for (std::size_t j = 0; j < m; ++j) coef[j] += w * fx * phi[j];
  }
  for (double& c : coef) {
    c *= h / 3.0;
    if (!std::isfinite(c)) throw NumericError("projection quadrature produced a non-finite value");
  }
  return coef;
}

}  // namespace jumpdrift
