// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "jumpdrift/basis.hpp"
#include "jumpdrift/estimator.hpp"
#include "jumpdrift/io.hpp"
#include "jumpdrift/linalg.hpp"
#include "jumpdrift/metrics.hpp"
#include "jumpdrift/sde_sim.hpp"
#include "jumpdrift/selection.hpp"
#include "support/oracles.hpp"

using namespace jumpdrift;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

int failures = 0;

void print(int id, const char* title, const Outcome& o) {
  std::printf("%s  %d. %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

// ---------------------------------------------------------------- 1, 2

struct TableRun {
  double c_cal = 0.0;
  std::vector<ExperimentReport> reports;
};

TableRun table_run() {
  ExperimentConfig cal;
  cal.model_id = 1;
  cal.repetitions = 50;
  cal.seed = 2024;
  const auto calibration = calibrate_c_cal(cal, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}, threads());

  TableRun run;
  run.c_cal = calibration.best_c_cal;
  for (int id : {1, 2, 3}) {
    ExperimentConfig cfg;
    cfg.model_id = id;
    cfg.c_cal = run.c_cal;
    run.reports.push_back(run_experiment(cfg, threads()));
  }
  return run;
}

Outcome criterion_table(const TableRun& run) {
  Outcome o;
  o.note("c_cal=" + io::format_double(run.c_cal) + (run.c_cal == kCalibratedCcal ? " (shipped)" : " (differs from shipped)"));
  const double lo[] = {0.06, 0.07, 0.09}, hi[] = {0.25, 0.30, 0.37};
  for (int k = 0; k < 3; ++k) {
    const double mean = run.reports[k].mise_stats.mean;
    o.note("model " + std::to_string(k + 1) + " mean MISE " + num(mean));
    o.require(mean >= lo[k] && mean <= hi[k],
              "model " + std::to_string(k + 1) + " in [" + num(lo[k], 2) + ", " + num(hi[k], 2) + "]");
  }
  const auto m = [&](int k) { return run.reports[k].mise_stats.mean; };
  o.require(m(0) < m(1) && m(1) < m(2), "ordering 1 < 2 < 3");
  return o;
}

Outcome criterion_mhat(const TableRun& run) {
  Outcome o;
  const double lo[] = {4.3, 3.0, 3.0}, hi[] = {6.0, 5.5, 5.5};
  for (int k = 0; k < 3; ++k) {
    const auto& s = run.reports[k].m_hat_stats;
    o.note("model " + std::to_string(k + 1) + " m_hat " + num(s.mean, 2) + " (sd " + num(s.stddev, 3) + ")");
    o.require(s.mean >= lo[k] && s.mean <= hi[k],
              "model " + std::to_string(k + 1) + " mean in [" + num(lo[k], 1) + ", " + num(hi[k], 1) + "]");
  }
  const auto sd = [&](int k) { return run.reports[k].m_hat_stats.stddev; };
  o.require(sd(0) < sd(1) && sd(0) < sd(2), "model 1 sd smallest");
  return o;
}

// ---------------------------------------------------------------- 3, 4, 5

// Instances whose Gram matrices criterion 5 inspects.
struct Instance {
  PathBundle bundle;
  Basis basis;
};
std::vector<Instance> instances;

PathBundle noise_free_bundle(const std::function<double(double)>& b, TimeGrid grid, std::size_t n) {
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    double x = -2.9 + 5.8 * static_cast<double>(i) / static_cast<double>(n - 1);
    values.push_back(x);
    for (std::size_t l = 0; l < grid.steps; ++l) {
      x += b(x) * grid.step();
      values.push_back(x);
    }
  }
  return PathBundle(grid, n, std::move(values));
}

Outcome criterion_oracle() {
  Outcome o;
  const auto trig = Basis::trigonometric(-3.0, 3.0);
  const std::vector<double> coef{0.4, -0.7, 0.25};
  const auto b = [&](double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += coef[j] * oracle::trig_function(j + 1, -3.0, 3.0, x);
    return s;
  };
  // L2 projection of b on phi_1..phi_3 by adaptive quadrature.
  std::vector<double> proj(3);
  for (std::size_t j = 0; j < 3; ++j)
    proj[j] = oracle::integrate([&](double x) { return b(x) * oracle::trig_function(j + 1, -3.0, 3.0, x); }, -3.0, 3.0);

  double worst = 0.0, tol = 0.0;
  for (std::size_t steps : {100, 400}) {
    const TimeGrid grid{2.0, steps};
    auto bundle = noise_free_bundle(b, grid, 40);
    const auto fit = fit_projection(bundle, trig, 3, GateMode::singular_only);
    tol = std::max(1e-8, grid.step());  // C = 1
    for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(fit.theta[j] - proj[j]));
    o.require(!fit.truncated, "noise-free fit not truncated");
    instances.push_back({std::move(bundle), trig});
  }
  o.note("noise-free max |theta - oracle| " + io::format_double(worst));
  o.require(worst <= tol, "noise-free recovery within max(1e-8, dt)");

  // Coefficient spread at N = 50 and N = 400 on model 3, m = 3.
  const std::size_t reps = 200;
  const auto spread = [&](std::size_t n, std::uint64_t seed) {
    std::vector<std::vector<double>> thetas(3);
    for (std::size_t r = 0; r < reps; ++r) {
      const auto bundle = simulate_bundle(builtin_model(3), TimeGrid{5.0, 200}, n, derive_seed(seed, r), threads());
      const auto fit = fit_projection(bundle, trig, 3, GateMode::singular_only);
      for (std::size_t j = 0; j < 3; ++j) thetas[j].push_back(fit.theta[j]);
      if (r == 0) instances.push_back({bundle, trig});
    }
    double var = 0.0;
    for (const auto& t : thetas) var += std::pow(summarize(t).stddev, 2);
    return std::sqrt(var);
  };
  const double ratio = spread(50, 501) / spread(400, 502);
  o.note("SE ratio N=50/N=400 " + num(ratio, 3));
  o.require(ratio >= 2.0 && ratio <= 3.6, "SE ratio in [2.0, 3.6]");
  return o;
}

Outcome criterion_minimizer() {
  Outcome o;
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal;
  const double scales[] = {1e-6, 1e-3, 1e-1, 1.0};
  double worst = std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const int model = 1 + static_cast<int>(i % 3);
    const std::size_t m = 1 + i % 6;
    const Basis basis = i % 4 == 3 ? Basis::hermite() : Basis::trigonometric(-3.0, 3.0);
    const auto bundle = simulate_bundle(builtin_model(model), TimeGrid{5.0, 200}, 100, 7000 + i);
    const auto moments = empirical_moments(bundle, basis, m);
    const auto fit = fit_from_moments(moments, basis, bundle.size(), bundle.horizon(), GateMode::singular_only);
    o.require(!fit.truncated, "instance " + std::to_string(i) + " not truncated");
    const double base = objective_gamma(moments, fit.theta);
    for (std::size_t k = 0; k < 100; ++k) {
      std::vector<double> t = fit.theta;
      for (auto& v : t) v += scales[k % 4] * normal(gen);
      const double diff = objective_gamma(moments, t) - base;
      worst = std::min(worst, diff);
      ++checked;
    }
    instances.push_back({bundle, basis});
  }
  o.note(std::to_string(checked) + " perturbations, min increase " + io::format_double(worst));
  o.require(worst >= -1e-12, "gamma_N(theta + delta) >= gamma_N(theta) - 1e-12");
  return o;
}

Outcome criterion_gram() {
  Outcome o;
  double min_eig = std::numeric_limits<double>::infinity();
  bool symmetric = true, nested = true;
  for (const auto& inst : instances) {
    const std::size_t m_max = 6;
    const auto full = empirical_moments(inst.bundle, inst.basis, m_max);
    for (std::size_t m = 1; m <= m_max; ++m) {
      const auto g = full.gram.leading_block(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) symmetric = symmetric && g(i, j) == g(j, i);
      min_eig = std::min(min_eig, sym_eigen_min(g));
      const auto small = empirical_moments(inst.bundle, inst.basis, m);
      nested = nested && small.gram == g;
      for (std::size_t j = 0; j < m; ++j) nested = nested && small.drift[j] == full.drift[j];
    }
  }
  o.note(std::to_string(instances.size()) + " instances, min eigenvalue " + io::format_double(min_eig));
  o.require(symmetric, "exact symmetry");
  o.require(min_eig >= -1e-12, "min eigenvalue >= -1e-12");
  o.require(nested, "nested-block prefix identity");
  return o;
}

// ---------------------------------------------------------------- 6, 7

Outcome criterion_trace() {
  Outcome o;
  const auto trig = Basis::trigonometric(-3.0, 3.0);
  for (int id : {1, 2, 3}) {
    for (std::size_t m : {2, 4, 6}) {
      const auto tc = trace_bound_check(builtin_model(id), trig, m, 500, 20, TimeGrid{5.0, 200}, 600 + id, threads());
      o.note("M" + std::to_string(id) + " m=" + std::to_string(m) + " " + num(tc.estimate, 3) + "/" + num(tc.bound, 2));
      o.require(!tc.inconclusive, "model " + std::to_string(id) + " m=" + std::to_string(m) + " conclusive");
      o.require(tc.estimate <= 1.2 * tc.bound, "model " + std::to_string(id) + " m=" + std::to_string(m) + " <= 1.2 bound");
    }
  }
  return o;
}

Outcome criterion_risk_decay() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.model_id = 1;
  cfg.dims = {5};
  cfg.repetitions = 50;
  cfg.n_paths = 400;
  cfg.seed = 401;
  const auto big = run_experiment(cfg, threads());
  cfg.n_paths = 50;
  cfg.seed = 402;
  const auto small = run_experiment(cfg, threads());
  const double se = std::sqrt(std::pow(big.mise_stats.stddev, 2) / 50.0 + std::pow(small.mise_stats.stddev, 2) / 50.0);
  o.note("MISE N=400 " + num(big.mise_stats.mean) + ", N=50 " + num(small.mise_stats.mean) + ", pooled SE " + num(se));
  o.require(big.mise.size() == 50 && small.mise.size() == 50, "all repetitions succeed");
  o.require(big.mise_stats.mean < small.mise_stats.mean - se, "N=400 below N=50 by one pooled SE");
  return o;
}

// ---------------------------------------------------------------- 8

Outcome criterion_basis() {
  Outcome o;
  const auto trig = Basis::trigonometric(-3.0, 3.0);
  const auto herm = Basis::hermite();
  double trig_err = 0.0, herm_err = 0.0;
  for (std::size_t j = 1; j <= 21; ++j) {
    for (std::size_t k = j; k <= 21; ++k) {
      const double v = oracle::integrate([&](double x) { return trig.eval(j, x) * trig.eval(k, x); }, -3.0, 3.0);
      trig_err = std::max(trig_err, std::abs(v - (j == k ? 1.0 : 0.0)));
    }
  }
  for (std::size_t j = 1; j <= 20; ++j) {
    for (std::size_t k = j; k <= 20; ++k) {
      const auto f = [&](double x) { return herm.eval(j, x) * herm.eval(k, x); };
      const double v = oracle::integrate(f, -20.0, -5.0) + oracle::integrate(f, -5.0, 5.0) + oracle::integrate(f, 5.0, 20.0);
      herm_err = std::max(herm_err, std::abs(v - (j == k ? 1.0 : 0.0)));
    }
  }
  o.note("orthonormality error trig " + io::format_double(trig_err) + ", Hermite " + io::format_double(herm_err));
  o.require(trig_err <= 1e-8, "trig orthonormality 1e-8");
  o.require(herm_err <= 1e-6, "Hermite orthonormality 1e-6");

  const double cap = std::pow(std::numbers::pi, -0.25) + 1e-9;
  double sup = 0.0;
  std::vector<double> vals(60);
  for (std::size_t i = 0; i < 100000; ++i) {
    const double x = -40.0 + 80.0 * static_cast<double>(i) / 99999.0;
    herm.eval_all(x, vals);
    for (double v : vals) sup = std::max(sup, std::abs(v));
  }
  o.note("Hermite sup (m <= 60) " + io::format_double(sup));
  o.require(sup <= cap, "Hermite sup-norm <= pi^-1/4 + 1e-9");

  bool l_ok = true;
  for (std::size_t m = 1; m <= 20; ++m) {
    l_ok = l_ok && compute_L(trig, m).value <= trig.c_phi_sq() * static_cast<double>(m);
    l_ok = l_ok && compute_L(herm, m).value <= herm.c_phi_sq() * static_cast<double>(m);
  }
  o.require(l_ok, "L(m) <= c_phi^2 m for m <= 20");
  return o;
}

// ---------------------------------------------------------------- 9

Outcome criterion_determinism() {
  Outcome o;
  bool same = true;
  for (int id : {1, 2, 3}) {
    ExperimentConfig cfg;
    cfg.model_id = id;
    cfg.repetitions = 8;
    cfg.n_paths = 100;
    cfg.seed = 31;
    const auto a = io::report_json(run_experiment(cfg, 1));
    const auto b = io::report_json(run_experiment(cfg, 1));
    const auto c = io::report_json(run_experiment(cfg, 4));
    same = same && a == b && a == c;
  }
  o.note("models 1-3, threads 1/1/4");
  o.require(same, "byte-identical reports");
  return o;
}

}  // namespace

int main() {
  const auto run = table_run();
  print(1, "Table reproduction", criterion_table(run));
  print(2, "Selected-dimension statistics", criterion_mhat(run));
  print(3, "Oracle equivalence", criterion_oracle());
  print(4, "Minimizer property", criterion_minimizer());
  print(5, "Gram properties", criterion_gram());
  print(6, "Trace bound", criterion_trace());
  print(7, "Risk decay", criterion_risk_decay());
  print(8, "Basis suites", criterion_basis());
  print(9, "Determinism", criterion_determinism());
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
