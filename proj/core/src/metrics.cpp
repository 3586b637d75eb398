#include "jumpdrift/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "jumpdrift/error.hpp"
#include "jumpdrift/linalg.hpp"
#include "jumpdrift/parallel.hpp"
#include "jumpdrift/rng.hpp"

namespace jumpdrift {

double mise(const DriftFit& fit, const Basis& basis, const std::function<double(double)>& true_b, Interval interval,
            std::size_t grid_n) {
  if (grid_n < 2) throw ParameterError("mise: grid_n must be >= 2");
  if (!(interval.lo < interval.hi)) throw ParameterError("mise: interval requires lo < hi");
  const double h = (interval.hi - interval.lo) / static_cast<double>(grid_n);
  double s = 0.0;
  for (std::size_t i = 0; i <= grid_n; ++i) {
    const double x = i == grid_n ? interval.hi : interval.lo + h * static_cast<double>(i);
    const double e = evaluate_fit(fit, basis, x) - true_b(x);
    s += (i == 0 || i == grid_n ? 0.5 : 1.0) * e * e;
  }
  return s * h;
}

std::vector<PlotRow> plot_data(const DriftFit& fit, const Basis& basis, const std::function<double(double)>& true_b,
                               Interval interval, std::size_t grid_n) {
  if (grid_n < 1) throw ParameterError("plot: grid_n must be >= 1");
  std::vector<PlotRow> rows;
  rows.reserve(grid_n + 1);
  const double h = (interval.hi - interval.lo) / static_cast<double>(grid_n);
  for (std::size_t i = 0; i <= grid_n; ++i) {
    const double x = i == grid_n ? interval.hi : interval.lo + h * static_cast<double>(i);
    rows.push_back({x, true_b(x), evaluate_fit(fit, basis, x)});
  }
  return rows;
}

SampleStats summarize(const std::vector<double>& xs) {
  SampleStats st;
  st.count = xs.size();
  if (xs.empty()) return st;
  st.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return st;
}

void ExperimentConfig::validate() const {
  builtin_model(model_id);
  if (n_paths < 1) throw ParameterError("experiment: N must be >= 1");
  grid().validate();
  if (!(intensity >= 0.0)) throw ParameterError("experiment: lambda must be >= 0");
  if (repetitions < 1) throw ParameterError("experiment: repetitions must be >= 1");
  if (mise_grid < 2) throw ParameterError("experiment: MISE grid must be >= 2");
  if (!(interval.lo < interval.hi)) throw ParameterError("experiment: interval requires lo < hi");
  selection().validate();
  make_basis();
}

SdeModel ExperimentConfig::model() const {
  SdeModel m = builtin_model(model_id);
  m.intensity = intensity;
  return m;
}

Basis ExperimentConfig::make_basis() const { return jumpdrift::make_basis(basis, interval.lo, interval.hi); }

SelectionConfig ExperimentConfig::selection() const {
  SelectionConfig s;
  s.dims = dims;
  s.c_cal = c_cal;
  s.mode = admissible;
  s.gate = gate;
  return s;
}

std::uint64_t repetition_seed(std::uint64_t seed, std::size_t rep) noexcept {
  return derive_seed(seed ^ 0x5851f42d4c957f2dULL, rep);
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const SdeModel model = config.model();
  const Basis basis = config.make_basis();
  const SelectionConfig selection = config.selection();

  ExperimentReport report;
  report.config = config;
  report.repetitions.resize(config.repetitions);
  parallel_for(config.repetitions, threads, [&](std::size_t r) {
    RepetitionResult& out = report.repetitions[r];
    try {
      const auto bundle = simulate_bundle(model, config.grid(), config.n_paths, repetition_seed(config.seed, r));
      auto sel = select_model(bundle, basis, selection);
      out.m_hat = sel.m_hat;
      out.admissible_fallback = sel.admissible.fallback;
      out.mise = mise(sel.fit, basis, model.drift, config.interval, config.mise_grid);
      if (r < config.plot_reps) out.fit = std::move(sel.fit);
    } catch (const Error& e) {
      out.ok = false;
      out.error = e.what();
    }
  });

  for (const auto& rep : report.repetitions) {
    if (!rep.ok) {
      ++report.failures;
      continue;
    }
    if (rep.admissible_fallback) ++report.fallbacks;
    report.mise.push_back(rep.mise);
    report.m_hat.push_back(static_cast<double>(rep.m_hat));
  }
  report.mise_stats = summarize(report.mise);
  report.m_hat_stats = summarize(report.m_hat);
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

CalibrationResult calibrate_c_cal(const ExperimentConfig& base, const std::vector<double>& grid, unsigned threads) {
  if (grid.empty()) throw ParameterError("calibration: c_cal grid must be nonempty");
  for (double c : grid) {
    if (!(c > 0.0)) throw ParameterError("calibration: grid values must be > 0");
  }
  base.validate();
  const SdeModel model = base.model();
  const Basis basis = base.make_basis();
  const SelectionConfig selection = base.selection();

  struct PerRep {
    bool ok = false;
    AdmissibleSet admissible;
    std::vector<double> norm;  // aligned with admissible.dims
    std::vector<double> err;
  };
  std::vector<PerRep> reps(base.repetitions);
  parallel_for(base.repetitions, threads, [&](std::size_t r) {
    try {
      const auto bundle = simulate_bundle(model, base.grid(), base.n_paths, repetition_seed(base.seed, r));
      std::vector<std::size_t> dims = selection.dims;
      const auto max_dim = *std::max_element(dims.begin(), dims.end());
      const auto moments = empirical_moments(bundle, basis, max_dim);
      PerRep& out = reps[r];
      out.admissible = admissible_dims(moments, bundle, basis, selection);
      for (auto m : out.admissible.dims) {
        const auto fit = fit_from_moments(moments.leading(m), basis, bundle.size(), bundle.horizon(), selection.gate);
        out.norm.push_back(fit.empirical_norm_sq);
        out.err.push_back(mise(fit, basis, model.drift, base.interval, base.mise_grid));
      }
      out.ok = true;
    } catch (const Error&) {
      reps[r].ok = false;
    }
  });

  CalibrationResult result;
  double best = std::numeric_limits<double>::infinity();
  for (double c : grid) {
    std::vector<double> errs, ms;
    for (const auto& rep : reps) {
      if (!rep.ok) continue;
      std::vector<double> crit;
      for (std::size_t k = 0; k < rep.admissible.dims.size(); ++k)
        crit.push_back(-rep.norm[k] + penalty(rep.admissible.dims[k], base.n_paths, base.horizon, c));
      const auto k = argmin_criterion(crit);
      errs.push_back(rep.err[k]);
      ms.push_back(static_cast<double>(rep.admissible.dims[k]));
    }
    CalibrationRow row{c, summarize(errs), summarize(ms)};
    if (row.mise.count > 0 && row.mise.mean < best) {
      best = row.mise.mean;
      result.best_c_cal = c;
    }
    result.table.push_back(row);
  }
  if (!(best < std::numeric_limits<double>::infinity())) throw Error("calibration: every repetition failed");
  return result;
}

TraceCheck trace_bound_check(const SdeModel& model, const Basis& basis, std::size_t m, std::size_t reps,
                             std::size_t n_paths, const TimeGrid& grid, std::uint64_t seed, unsigned threads) {
  model.validate();
  basis.check_dim(m);
  if (reps < 1 || n_paths < 1) throw ParameterError("trace check: reps and N must be >= 1");
  TraceCheck check;
  check.bound = (model.diffusion_sup * model.diffusion_sup +
                 model.intensity * model.jumps.second_moment() * model.jump_coeff_sup * model.jump_coeff_sup) *
                static_cast<double>(m);

  const double nt = static_cast<double>(n_paths) * grid.horizon;
  std::vector<SymMatrix> grams(reps);
  std::vector<std::vector<double>> noise(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto bundle = simulate_bundle(model, grid, n_paths, derive_seed(seed, r));
    auto moments = empirical_moments(bundle, basis, m);
    // Drift part (<b, phi_j>_N)_j with the same left-point rule as the moments.
    std::vector<double> drift_part(m, 0.0), phi(m);
    const double dt = grid.step();
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      const auto p = bundle.path(i);
      for (std::size_t l = 0; l < grid.steps; ++l) {
        basis.eval_all(p[l], phi);
        const double b = model.drift(p[l]);
        for (std::size_t j = 0; j < m; ++j) drift_part[j] += b * phi[j];
      }
    }
    std::vector<double> e(m);
    for (std::size_t j = 0; j < m; ++j) e[j] = moments.drift[j] - drift_part[j] * dt / nt;
    grams[r] = std::move(moments.gram);
    noise[r] = std::move(e);
  });

  SymMatrix psi(m), psi_sigma(m);
  {
    std::vector<double> psum(m * m, 0.0), ssum(m * m, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
          psum[j * m + k] += grams[r](j, k);
          ssum[j * m + k] += noise[r][j] * noise[r][k];
        }
      }
    }
    const double inv_reps = 1.0 / static_cast<double>(reps);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = j; k < m; ++k) {
        psi.set(j, k, psum[j * m + k] * inv_reps);
        psi_sigma.set(j, k, nt * ssum[j * m + k] * inv_reps);
      }
    }
  }

  // trace(Psi^-1/2 S Psi^-1/2) = trace(Psi^-1 S).
  try {
    double tr = 0.0;
    std::vector<double> col(m);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < m; ++j) col[j] = psi_sigma(j, k);
      tr += cholesky_solve(psi, col)[k];
    }
    check.estimate = tr;
  } catch (const SingularMatrixError&) {
    check.inconclusive = true;
    check.estimate = std::numeric_limits<double>::quiet_NaN();
    check.note = "estimated Gram matrix is singular";
    return check;
  }
  if (reps < kMinTraceReps) {
    check.inconclusive = true;
    check.note = "too few bundles for a stable estimate";
  }
  return check;
}

}  // namespace jumpdrift
