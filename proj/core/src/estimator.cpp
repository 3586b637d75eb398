#include "jumpdrift/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jumpdrift/error.hpp"
#include "jumpdrift/parallel.hpp"

namespace jumpdrift {

namespace {

// Paths per partial sum. Fixed so the reduction order never depends on the worker count.
constexpr std::size_t kChunk = 32;

double scale_of(const PathBundle& bundle) {
  if (bundle.size() == 0) throw ParameterError("empty bundle");
  return bundle.grid().step() / (static_cast<double>(bundle.size()) * bundle.horizon());
}

}  // namespace

double empirical_inner(const PathBundle& bundle, const std::function<double(double)>& f,
                       const std::function<double(double)>& g) {
  const double scale = scale_of(bundle);
  const std::size_t n = bundle.grid().steps;
  double total = 0.0;
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const auto p = bundle.path(i);
    for (std::size_t l = 0; l < n; ++l) {
      const double v = f(p[l]) * g(p[l]);
      if (!std::isfinite(v)) throw NumericError("empirical_inner: non-finite integrand at a visited state");
      total += v;
    }
  }
  return total * scale;
}

EmpiricalMoments EmpiricalMoments::leading(std::size_t m) const {
  if (m > dim()) throw ParameterError("moments: requested dimension exceeds accumulated one");
  return {gram.leading_block(m), std::vector<double>(drift.begin(), drift.begin() + static_cast<std::ptrdiff_t>(m))};
}

EmpiricalMoments empirical_moments(const PathBundle& bundle, const Basis& basis, std::size_t m, unsigned threads) {
  basis.check_dim(m);
  const double scale = scale_of(bundle);
  const std::size_t n = bundle.grid().steps;
  const std::size_t tri = m * (m + 1) / 2;
  const std::size_t chunks = (bundle.size() + kChunk - 1) / kChunk;
  // Per chunk: packed upper triangle of sum phi_j phi_k, then sum phi_j dX.
  std::vector<double> partial(chunks * (tri + m), 0.0);

  parallel_for(chunks, threads, [&](std::size_t c) {
    double* acc = partial.data() + c * (tri + m);
    std::vector<double> phi(m);
    const std::size_t end = std::min(bundle.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const auto p = bundle.path(i);
      for (std::size_t l = 0; l < n; ++l) {
        basis.eval_all(p[l], phi);
        const double dx = p[l + 1] - p[l];
        std::size_t t = 0;
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = j; k < m; ++k) acc[t++] += phi[j] * phi[k];
        }
        for (std::size_t j = 0; j < m; ++j) acc[tri + j] += phi[j] * dx;
      }
    }
  });

  std::vector<double> sums(tri + m, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t t = 0; t < tri + m; ++t) sums[t] += partial[c * (tri + m) + t];
  for (double s : sums) {
    if (!std::isfinite(s)) throw NumericError("empirical moments: non-finite accumulation");
  }

  EmpiricalMoments out{SymMatrix(m), std::vector<double>(m)};
  std::size_t t = 0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = j; k < m; ++k) out.gram.set(j, k, sums[t++] * scale);
  // The dX sums carry no dt factor.
  const double drift_scale = scale / bundle.grid().step();
  for (std::size_t j = 0; j < m; ++j) out.drift[j] = sums[tri + j] * drift_scale;
  return out;
}

SymMatrix gram_matrix(const PathBundle& bundle, const Basis& basis, std::size_t m) {
  return empirical_moments(bundle, basis, m).gram;
}

std::vector<double> empirical_vector(const PathBundle& bundle, const Basis& basis, std::size_t m) {
  return empirical_moments(bundle, basis, m).drift;
}

double truncation_constant(double horizon) {
  if (!(horizon > 0.0)) throw ParameterError("truncation constant: horizon must be > 0");
  return (3.0 * std::log(1.5) - 1.0) / (8.0 * horizon);
}

double truncation_threshold(std::size_t n_paths, double horizon) {
  const double nt = static_cast<double>(n_paths) * horizon;
  if (!(nt > 1.0)) throw ParameterError("truncation threshold requires N*T > 1");
  return truncation_constant(horizon) * nt / std::log(nt);
}

DriftFit fit_from_moments(const EmpiricalMoments& moments, const Basis& basis, std::size_t n_paths, double horizon,
                          GateMode gate) {
  const std::size_t m = moments.dim();
  basis.check_dim(m);
  DriftFit fit;
  fit.m = m;
  fit.theta.assign(m, 0.0);
  fit.gram_min_eig = sym_eigen_min(moments.gram);
  fit.inv_op_norm = fit.gram_min_eig > 0.0 ? 1.0 / fit.gram_min_eig : std::numeric_limits<double>::infinity();
  fit.gate_statistic = compute_L(basis, m).value * std::max(fit.inv_op_norm, 1.0);
  const double nt = static_cast<double>(n_paths) * horizon;
  fit.gate_threshold = nt > 1.0 ? truncation_threshold(n_paths, horizon) : std::numeric_limits<double>::quiet_NaN();

  if (gate == GateMode::theoretical) {
    if (!(nt > 1.0)) throw ParameterError("fit: the truncation gate requires N*T > 1");
    if (!(fit.gate_statistic <= fit.gate_threshold)) {
      fit.truncated = true;
      return fit;
    }
  }
  try {
    fit.theta = cholesky_solve(moments.gram, moments.drift);
  } catch (const SingularMatrixError&) {
    fit.truncated = true;
    fit.theta.assign(m, 0.0);
    return fit;
  }
  fit.empirical_norm_sq = moments.gram.quadratic_form(fit.theta);
  fit.objective = objective_gamma(moments, fit.theta);
  return fit;
}

DriftFit fit_projection(const PathBundle& bundle, const Basis& basis, std::size_t m, GateMode gate) {
  return fit_from_moments(empirical_moments(bundle, basis, m), basis, bundle.size(), bundle.horizon(), gate);
}

double evaluate_fit(const DriftFit& fit, const Basis& basis, double x) {
  if (fit.truncated || fit.m == 0) return 0.0;
  if (fit.theta.size() != fit.m) throw ParameterError("fit: theta length differs from m");
  std::vector<double> phi(fit.m);
  basis.eval_all(x, phi);
  return std::inner_product(phi.begin(), phi.end(), fit.theta.begin(), 0.0);
}

double objective_gamma(const EmpiricalMoments& moments, std::span<const double> theta) {
  if (theta.size() != moments.dim()) throw ParameterError("objective: theta length differs from m");
  const double quad = moments.gram.quadratic_form(theta);
  const double lin = std::inner_product(theta.begin(), theta.end(), moments.drift.begin(), 0.0);
  return quad - 2.0 * lin;
}

double objective_gamma(const PathBundle& bundle, const Basis& basis, std::span<const double> theta) {
  return objective_gamma(empirical_moments(bundle, basis, theta.size()), theta);
}

}  // namespace jumpdrift
