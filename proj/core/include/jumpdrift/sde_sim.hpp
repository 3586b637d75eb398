#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jumpdrift/rng.hpp"

namespace jumpdrift {

using ScalarFn = std::function<double(double)>;

// Normal jump-size law N(mean, stddev^2). The experiments use N(0, 1).
struct JumpLaw {
  double mean = 0.0;
  double stddev = 1.0;

  double first_moment() const noexcept { return mean; }
  double second_moment() const noexcept { return mean * mean + stddev * stddev; }
  double fourth_moment() const noexcept {
    const double m2 = mean * mean, s2 = stddev * stddev;
    return m2 * m2 + 6.0 * m2 * s2 + 3.0 * s2 * s2;
  }
  double sample(Stream& rng) const noexcept { return mean + stddev * rng.normal(); }
};

// Jump epochs in (0, T] (strictly increasing) with their sizes.
struct JumpTrain {
  std::vector<double> times;
  std::vector<double> sizes;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

/// dX = b(X)dt + sigma(X)dB + gamma(X)d(Z - c_zeta * lambda * t), X_0 = x0.
///
/// `diffusion_sup` and `jump_coeff_sup` are sup-norm bounds of sigma and
/// gamma; they feed the variance trace bound and may be left at 0 for
/// custom models that do not need it.
struct SdeModel {
  int id = 0;  // 1..3 for built-in models, 0 otherwise
  ScalarFn drift;
  ScalarFn diffusion;
  ScalarFn jump_coeff;
  double x0 = 0.0;
  double intensity = 0.0;
  JumpLaw jumps;
  double diffusion_sup = 0.0;
  double jump_coeff_sup = 0.0;

  void validate() const;
};

// Built-in experiment models 1..3.
SdeModel builtin_model(int id);

// Uniform grid t_l = l * horizon / steps, l = 0..steps.
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 1;

  double step() const noexcept { return horizon / static_cast<double>(steps); }
  double node(std::size_t l) const noexcept {
    return horizon * static_cast<double>(l) / static_cast<double>(steps);
  }
  std::size_t nodes() const noexcept { return steps + 1; }

  void validate() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

using Path = std::vector<double>;

// N paths on a shared grid, stored path-major: path i occupies
// values[i * grid.nodes() .. (i + 1) * grid.nodes()).
class PathBundle {
 public:
  PathBundle() = default;
  PathBundle(TimeGrid grid, std::size_t n_paths, std::vector<double> values, std::uint64_t seed = 0);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return n_paths_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double horizon() const noexcept { return grid_.horizon; }

  std::span<const double> path(std::size_t i) const {
    return {values_.data() + i * grid_.nodes(), grid_.nodes()};
  }
  const std::vector<double>& values() const noexcept { return values_; }

  // Keep every `factor`-th node; the result lives on a coarser grid.
  PathBundle subsample(std::size_t factor) const;

  friend bool operator==(const PathBundle&, const PathBundle&) = default;

 private:
  TimeGrid grid_;
  std::size_t n_paths_ = 0;
  std::vector<double> values_;
  std::uint64_t seed_ = 0;
};

JumpTrain sample_compound_poisson(double intensity, double horizon, const JumpLaw& law, Stream& rng);

// Euler scheme with the jump sizes falling in (t_l, t_{l+1}] summed into step l.
// The number of jumps on [0, T] goes to `jump_count` when given.
Path simulate_path(const SdeModel& model, const TimeGrid& grid, Stream& rng, std::size_t* jump_count = nullptr);

// Path i is driven by Stream(derive_seed(seed, i)); output does not depend on `threads`.
PathBundle simulate_bundle(const SdeModel& model, const TimeGrid& grid, std::size_t n_paths,
                           std::uint64_t seed, unsigned threads = 1,
                           std::vector<std::size_t>* jump_counts = nullptr);

}  // namespace jumpdrift
