#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "jumpdrift/basis.hpp"
#include "jumpdrift/linalg.hpp"
#include "jumpdrift/sde_sim.hpp"
#include "support/oracles.hpp"

namespace fixtures {

using namespace jumpdrift;

inline PathBundle constant_bundle(double value, std::size_t n_paths, TimeGrid grid) {
  return PathBundle(grid, n_paths, std::vector<double>(n_paths * grid.nodes(), value));
}

// Noise-free Euler paths of dx = b(x) dt from each start value.
inline PathBundle ode_bundle(const std::function<double(double)>& b, const std::vector<double>& starts, TimeGrid grid) {
  std::vector<double> values;
  for (double x0 : starts) {
    double x = x0;
    values.push_back(x);
    for (std::size_t l = 0; l < grid.steps; ++l) {
      x += b(x) * grid.step();
      values.push_back(x);
    }
  }
  return PathBundle(grid, starts.size(), std::move(values));
}

inline std::vector<double> spread(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Least-squares projection of f onto span(phi_1..phi_m) under the empirical
// occupation measure, solved by Gaussian elimination from direct sums.
inline std::vector<double> weighted_projection_oracle(const PathBundle& bundle, const Basis& basis, std::size_t m,
                                                      const std::function<double(double)>& f) {
  std::vector<double> a(m * m, 0.0), rhs(m, 0.0);
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const auto p = bundle.path(i);
    for (std::size_t l = 0; l < bundle.grid().steps; ++l) {
      for (std::size_t j = 0; j < m; ++j) {
        const double pj = oracle::trig_function(j + 1, basis.lo(), basis.hi(), p[l]);
        rhs[j] += pj * f(p[l]);
        for (std::size_t k = 0; k < m; ++k) a[j * m + k] += pj * oracle::trig_function(k + 1, basis.lo(), basis.hi(), p[l]);
      }
    }
  }
  return oracle::gauss_solve(a, rhs);
}

// Symmetric exactly, smallest eigenvalue >= -1e-12.
inline void check_gram_properties(const SymMatrix& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g(i, j) == g(j, i));
  CHECK(sym_eigen_min(g) >= -1e-12);
}

}  // namespace fixtures
