#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jumpdrift/basis.hpp"
#include "jumpdrift/estimator.hpp"
#include "jumpdrift/sde_sim.hpp"
#include "jumpdrift/selection.hpp"

namespace jumpdrift {

struct Interval {
  double lo = -3.0;
  double hi = 3.0;
};

// Trapezoid rule for the integral over [lo, hi] of (bhat - b)^2 on grid_n + 1 uniform nodes.
double mise(const DriftFit& fit, const Basis& basis, const std::function<double(double)>& true_b,
            Interval interval, std::size_t grid_n = 1000);

struct PlotRow {
  double x;
  double b;
  double bhat;
};

std::vector<PlotRow> plot_data(const DriftFit& fit, const Basis& basis,
                               const std::function<double(double)>& true_b, Interval interval,
                               std::size_t grid_n = 1000);

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;  // (n - 1) divisor; 0 with fewer than two samples
  std::size_t count = 0;
};

SampleStats summarize(const std::vector<double>& xs);

// Defaults reproduce the benchmark protocol: N = 400, n = 200, T = 5,
// lambda = 0.5, trig basis on [-3, 3], dims 1..6, 100 repetitions.
struct ExperimentConfig {
  int model_id = 1;
  std::size_t n_paths = 400;
  std::size_t steps = 200;
  double horizon = 5.0;
  double intensity = 0.5;
  std::string basis = "trig";
  Interval interval{-3.0, 3.0};
  std::vector<std::size_t> dims{1, 2, 3, 4, 5, 6};
  double c_cal = kCalibratedCcal;
  AdmissibleMode admissible = AdmissibleMode::all;
  GateMode gate = GateMode::singular_only;
  std::size_t repetitions = 100;
  std::uint64_t seed = 7;
  std::size_t mise_grid = 1000;
  // Repetitions (from 0) whose fits are kept for plotting.
  std::size_t plot_reps = 0;

  void validate() const;
  SdeModel model() const;
  TimeGrid grid() const { return {horizon, steps}; }
  Basis make_basis() const;
  SelectionConfig selection() const;
};

struct RepetitionResult {
  bool ok = true;
  std::string error;
  double mise = 0.0;
  std::size_t m_hat = 0;
  bool admissible_fallback = false;
  DriftFit fit;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<double> mise;       // ok repetitions only, in repetition order
  std::vector<double> m_hat;      // aligned with mise
  std::vector<RepetitionResult> repetitions;  // all, in repetition order
  SampleStats mise_stats;
  SampleStats m_hat_stats;
  std::size_t failures = 0;
  std::size_t fallbacks = 0;
  double wall_time_s = 0.0;
};

// Repetition r uses the bundle seed derive_seed(config.seed, r).
std::uint64_t repetition_seed(std::uint64_t seed, std::size_t rep) noexcept;

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 1);

struct CalibrationRow {
  double c_cal;
  SampleStats mise;
  SampleStats m_hat;
};

struct CalibrationResult {
  double best_c_cal = 0.0;
  std::vector<CalibrationRow> table;
};

/// Picks the c_cal of `grid` that minimizes mean MISE of the adaptive
/// estimator against the known drift of `base.model_id`.
///
/// Each repetition is simulated and fitted once for every candidate
/// dimension; the grid values then only change the argmin. The result for a
/// given c equals run_experiment with that c_cal on the same seeds.
CalibrationResult calibrate_c_cal(const ExperimentConfig& base, const std::vector<double>& grid,
                                  unsigned threads = 1);

/// Monte Carlo check of trace(Psi_m^-1/2 Psi_{m,sigma} Psi_m^-1/2)
///   <= (||sigma||^2 + lambda c_{zeta^2} ||gamma||^2) m.
///
/// Psi_m is the mean Gram matrix over `reps` bundles of `n_paths` paths and
/// Psi_{m,sigma} = NT E(E_m E_m'), with E_m = X_m - (<b, phi_j>_N)_j from the
/// known drift.
struct TraceCheck {
  double estimate = 0.0;
  double bound = 0.0;
  bool inconclusive = false;
  std::string note;
};

// Below this many bundles the check is reported inconclusive.
inline constexpr std::size_t kMinTraceReps = 10;

TraceCheck trace_bound_check(const SdeModel& model, const Basis& basis, std::size_t m, std::size_t reps,
                             std::size_t n_paths, const TimeGrid& grid, std::uint64_t seed,
                             unsigned threads = 1);

}  // namespace jumpdrift
