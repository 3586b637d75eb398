#include "jumpdrift/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jumpdrift/error.hpp"
#include "jumpdrift/parallel.hpp"

namespace jumpdrift {

void SdeModel::validate() const {
  if (!drift || !diffusion || !jump_coeff) throw ParameterError("model: drift, diffusion and jump coefficient are required");
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw ParameterError("model: jump intensity must be finite and >= 0");
  if (!std::isfinite(x0)) throw ParameterError("model: x0 must be finite");
  if (!(jumps.stddev >= 0.0) || !std::isfinite(jumps.mean)) throw ParameterError("model: invalid jump law");
}

SdeModel builtin_model(int id) {
  SdeModel model;
  model.id = id;
  model.x0 = 0.5;
  model.intensity = 0.5;
  model.jumps = JumpLaw{0.0, 1.0};
  model.jump_coeff = [](double) { return 1.0; };
  model.jump_coeff_sup = 1.0;
  switch (id) {
    case 1:  // linear drift, additive noise
      model.drift = [](double x) { return -x; };
      model.diffusion = [](double) { return 0.5; };
      model.diffusion_sup = 0.5;
      break;
    case 2:  // nonlinear drift, additive noise
      model.drift = [](double x) { return 0.5 * std::sqrt(1.0 + x * x); };
      model.diffusion = [](double) { return 0.5; };
      model.diffusion_sup = 0.5;
      break;
    case 3:  // nonlinear drift, multiplicative noise
      model.drift = [](double x) { return 0.5 * std::sqrt(1.0 + x * x); };
      model.diffusion = [](double x) {
        const double c = std::cos(x);
        return 0.5 * (1.0 + c * c);
      };
      model.diffusion_sup = 1.0;
      break;
    default:
      throw ParameterError("unknown model id " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
  return model;
}

void TimeGrid::validate() const {
  if (steps < 1) throw ParameterError("grid: steps must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("grid: horizon must be finite and > 0");
}

PathBundle::PathBundle(TimeGrid grid, std::size_t n_paths, std::vector<double> values, std::uint64_t seed)
    : grid_(grid), n_paths_(n_paths), values_(std::move(values)), seed_(seed) {
  grid_.validate();
  if (values_.size() != n_paths_ * grid_.nodes()) throw ParameterError("bundle: value count does not match N * (n + 1)");
}

PathBundle PathBundle::subsample(std::size_t factor) const {
  if (factor < 1 || grid_.steps % factor != 0) throw ParameterError("subsample: factor must divide the step count");
  const TimeGrid coarse{grid_.horizon, grid_.steps / factor};
  std::vector<double> out;
  out.reserve(n_paths_ * coarse.nodes());
  for (std::size_t i = 0; i < n_paths_; ++i) {
    const auto p = path(i);
    for (std::size_t l = 0; l < coarse.nodes(); ++l) out.push_back(p[l * factor]);
  }
  return PathBundle(coarse, n_paths_, std::move(out), seed_);
}

JumpTrain sample_compound_poisson(double intensity, double horizon, const JumpLaw& law, Stream& rng) {
  if (!(intensity >= 0.0)) throw ParameterError("compound Poisson: intensity must be >= 0");
  if (!(horizon > 0.0)) throw ParameterError("compound Poisson: horizon must be > 0");
  JumpTrain train;
  const std::uint64_t count = intensity > 0.0 ? rng.poisson(intensity * horizon) : 0;
  train.times.reserve(count);
  // uniform() lies in (0, 1], so every epoch is in (0, T].
  for (std::uint64_t k = 0; k < count; ++k) train.times.push_back(horizon * rng.uniform());
  std::sort(train.times.begin(), train.times.end());
  train.sizes.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) train.sizes.push_back(law.sample(rng));
  return train;
}

Path simulate_path(const SdeModel& model, const TimeGrid& grid, Stream& rng, std::size_t* jump_count) {
  const std::size_t n = grid.steps;
  const double dt = grid.step();
  const double sqrt_dt = std::sqrt(dt);
  const double compensator = model.jumps.first_moment() * model.intensity * dt;

  // Sum of jump sizes with epoch in (t_l, t_{l+1}].
  std::vector<double> jump_sum(n, 0.0);
  const JumpTrain train = sample_compound_poisson(model.intensity, grid.horizon, model.jumps, rng);
  for (std::size_t k = 0; k < train.size(); ++k) {
    const double pos = std::ceil(train.times[k] / dt) - 1.0;
    const auto l = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n - 1)));
    jump_sum[l] += train.sizes[k];
  }
  if (jump_count) *jump_count = train.size();

  Path x(n + 1);
  x[0] = model.x0;
  for (std::size_t l = 0; l < n; ++l) {
    const double xl = x[l];
    const double next = xl + model.drift(xl) * dt + model.diffusion(xl) * sqrt_dt * rng.normal() +
                        model.jump_coeff(xl) * (jump_sum[l] - compensator);
    if (!std::isfinite(next)) throw SimulationDiverged(l);
    x[l + 1] = next;
  }
  return x;
}

PathBundle simulate_bundle(const SdeModel& model, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           unsigned threads, std::vector<std::size_t>* jump_counts) {
  model.validate();
  grid.validate();
  if (n_paths < 1) throw ParameterError("bundle: N must be >= 1");
  const std::size_t nodes = grid.nodes();
  std::vector<double> values(n_paths * nodes);
  if (jump_counts) jump_counts->assign(n_paths, 0);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    Stream rng(derive_seed(seed, i));
    try {
      const Path p = simulate_path(model, grid, rng, jump_counts ? &(*jump_counts)[i] : nullptr);
      std::copy(p.begin(), p.end(), values.begin() + static_cast<std::ptrdiff_t>(i * nodes));
    } catch (const SimulationDiverged& e) {
      throw e.with_path(i);
    }
  });
  return PathBundle(grid, n_paths, std::move(values), seed);
}

}  // namespace jumpdrift
