#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "jumpdrift/basis.hpp"
#include "jumpdrift/linalg.hpp"
#include "jumpdrift/sde_sim.hpp"

namespace jumpdrift {

// <f, g>_N = (1/NT) sum_i sum_{l<n} f(X^i_l) g(X^i_l) dt.
double empirical_inner(const PathBundle& bundle, const std::function<double(double)>& f,
                       const std::function<double(double)>& g);

// Gram matrix and drift vector of one bundle at dimension m, accumulated in a
// single pass. Entries depend only on (j, l), so the moments at m' < m are the
// leading blocks of the moments at m.
struct EmpiricalMoments {
  SymMatrix gram;
  std::vector<double> drift;  // (1/NT) sum_i sum_l phi_j(X_l)(X_{l+1} - X_l)

  std::size_t dim() const noexcept { return drift.size(); }
  EmpiricalMoments leading(std::size_t m) const;
};

// Per-path partial sums are reduced in path order, so `threads` never changes the result.
EmpiricalMoments empirical_moments(const PathBundle& bundle, const Basis& basis, std::size_t m,
                                   unsigned threads = 1);

SymMatrix gram_matrix(const PathBundle& bundle, const Basis& basis, std::size_t m);
std::vector<double> empirical_vector(const PathBundle& bundle, const Basis& basis, std::size_t m);

// c_T = (3 log(3/2) - 1) / (8T).
double truncation_constant(double horizon);

// c_T * NT / log(NT); requires NT > 1.
double truncation_threshold(std::size_t n_paths, double horizon);

// How a fit decides to fall back to the zero function.
enum class GateMode {
  theoretical,    // L(m) (||Psi^-1||_op v 1) <= c_T NT/log(NT), or a singular solve
  singular_only,  // only a singular Cholesky solve
};

struct DriftFit {
  std::size_t m = 0;
  std::vector<double> theta;
  double gram_min_eig = 0.0;
  double inv_op_norm = 0.0;  // +inf when the Gram matrix is singular
  double gate_statistic = 0.0;  // L(m) * max(inv_op_norm, 1)
  double gate_threshold = 0.0;
  bool truncated = false;
  double empirical_norm_sq = 0.0;  // theta' Psi theta
  double objective = 0.0;          // gamma_N at theta
};

DriftFit fit_from_moments(const EmpiricalMoments& moments, const Basis& basis, std::size_t n_paths,
                          double horizon, GateMode gate = GateMode::theoretical);

DriftFit fit_projection(const PathBundle& bundle, const Basis& basis, std::size_t m,
                        GateMode gate = GateMode::theoretical);

double evaluate_fit(const DriftFit& fit, const Basis& basis, double x);

// gamma_N(sum theta_j phi_j) = theta' Psi theta - 2 theta' X.
double objective_gamma(const EmpiricalMoments& moments, std::span<const double> theta);
double objective_gamma(const PathBundle& bundle, const Basis& basis, std::span<const double> theta);

}  // namespace jumpdrift
