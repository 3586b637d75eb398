#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "jumpdrift/error.hpp"
#include "jumpdrift/sde_sim.hpp"
#include "support/oracles.hpp"

using namespace jumpdrift;

namespace {

SdeModel deterministic(ScalarFn drift, double x0) {
  SdeModel m;
  m.drift = std::move(drift);
  m.diffusion = [](double) { return 0.0; };
  m.jump_coeff = [](double) { return 0.0; };
  m.x0 = x0;
  m.intensity = 0.0;
  return m;
}

}  // namespace

TEST_CASE("compound Poisson: zero intensity gives an empty train") {
  Stream rng(1);
  const auto train = sample_compound_poisson(0.0, 5.0, JumpLaw{}, rng);
  CHECK(train.empty());
  CHECK(train.sizes.empty());
}

TEST_CASE("compound Poisson: parameter errors") {
  Stream rng(1);
  CHECK_THROWS_AS(sample_compound_poisson(-0.1, 5.0, JumpLaw{}, rng), ParameterError);
  CHECK_THROWS_AS(sample_compound_poisson(0.5, 0.0, JumpLaw{}, rng), ParameterError);
  CHECK_THROWS_AS(sample_compound_poisson(0.5, -1.0, JumpLaw{}, rng), ParameterError);
}

TEST_CASE("compound Poisson: counts, epochs and sizes over 1e5 trains") {
  constexpr std::size_t kTrains = 100000;
  constexpr double kLambda = 0.5, kHorizon = 5.0, kMean = kLambda * kHorizon;
  Stream rng(derive_seed(2024, 0));
  std::vector<std::size_t> hist(64, 0);
  double count_sum = 0.0, size_sum = 0.0;
  std::size_t n_sizes = 0;
  bool epochs_ok = true;
  for (std::size_t r = 0; r < kTrains; ++r) {
    const auto train = sample_compound_poisson(kLambda, kHorizon, JumpLaw{}, rng);
    REQUIRE(train.times.size() == train.sizes.size());
    count_sum += static_cast<double>(train.size());
    ++hist[std::min<std::size_t>(train.size(), hist.size() - 1)];
    for (std::size_t k = 0; k < train.size(); ++k) {
      epochs_ok = epochs_ok && train.times[k] > 0.0 && train.times[k] <= kHorizon;
      if (k > 0) epochs_ok = epochs_ok && train.times[k] > train.times[k - 1];
      size_sum += train.sizes[k];
    }
    n_sizes += train.size();
  }
  CHECK(epochs_ok);
  // Oracle: E[count] = lambda T.
  CHECK(std::abs(count_sum / kTrains - kMean) < 0.05);
  // Standard normal sizes: sample mean within 4 sigma / sqrt(n).
  CHECK(std::abs(size_sum / static_cast<double>(n_sizes)) < 4.0 / std::sqrt(static_cast<double>(n_sizes)));

  // Chi-square goodness of fit against Poisson(lambda T), tail pooled so every cell expects >= 5.
  std::vector<double> observed, expected;
  double tail_prob = 1.0;
  std::size_t k = 0;
  for (; k < hist.size(); ++k) {
    const double e = kTrains * oracle::poisson_pmf(k, kMean);
    if (e < 5.0 || kTrains * (tail_prob - oracle::poisson_pmf(k, kMean)) < 5.0) break;
    observed.push_back(static_cast<double>(hist[k]));
    expected.push_back(e);
    tail_prob -= oracle::poisson_pmf(k, kMean);
  }
  double tail_obs = 0.0;
  for (std::size_t j = k; j < hist.size(); ++j) tail_obs += static_cast<double>(hist[j]);
  observed.push_back(tail_obs);
  expected.push_back(kTrains * tail_prob);
  double stat = 0.0;
  for (std::size_t j = 0; j < observed.size(); ++j) stat += std::pow(observed[j] - expected[j], 2) / expected[j];
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  const double critical = boost::math::quantile(dist, 0.99);
  INFO("chi2 = " << stat << " critical = " << critical << " cells = " << observed.size());
  CHECK(stat < critical);
}

TEST_CASE("simulate_path: no dynamics keeps the initial state") {
  const auto model = deterministic([](double) { return 0.0; }, 0.5);
  Stream rng(3);
  const auto path = simulate_path(model, TimeGrid{5.0, 200}, rng);
  REQUIRE(path.size() == 201);
  for (double x : path) CHECK(x == 0.5);
}

TEST_CASE("simulate_path: Euler on dx = -x dt tracks the exact flow") {
  const auto model = deterministic([](double x) { return -x; }, 0.5);
  Stream rng(3);
  const auto path = simulate_path(model, TimeGrid{5.0, 200}, rng);
  CHECK(std::abs(path.back() - oracle::linear_decay(0.5, 5.0)) < 0.01);

  // First-order convergence: doubling n halves the maximal error.
  auto max_err = [&](std::size_t n) {
    Stream s(3);
    const TimeGrid grid{5.0, n};
    const auto p = simulate_path(model, grid, s);
    double e = 0.0;
    for (std::size_t l = 0; l <= n; ++l) e = std::max(e, std::abs(p[l] - oracle::linear_decay(0.5, grid.node(l))));
    return e;
  };
  for (std::size_t n : {100u, 200u, 400u}) {
    const double ratio = max_err(n) / max_err(2 * n);
    INFO("n = " << n << " ratio = " << ratio);
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
  }
}

TEST_CASE("simulate_path: overflow raises SimulationDiverged with the step") {
  auto model = deterministic([](double x) { return x * x; }, 10.0);
  Stream rng(1);
  try {
    simulate_path(model, TimeGrid{5.0, 200}, rng);
    FAIL("expected divergence");
  } catch (const SimulationDiverged& e) {
    CHECK(e.step() < 200);
    CHECK(e.path() == SimulationDiverged::kNoPath);
  }
  try {
    simulate_bundle(model, TimeGrid{5.0, 200}, 3, 1);
    FAIL("expected divergence");
  } catch (const SimulationDiverged& e) {
    CHECK(e.path() == 0);
  }
}

TEST_CASE("Model 1: mean path follows 0.5 e^{-t} within 4 standard errors") {
  const auto model = builtin_model(1);
  const TimeGrid grid{5.0, 200};
  const auto bundle = simulate_bundle(model, grid, 10000, 99, 4);
  bool all_ok = true;
  for (std::size_t l = 0; l <= grid.steps; ++l) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      const double x = bundle.path(i)[l];
      s += x;
      ss += x * x;
    }
    const double n = static_cast<double>(bundle.size());
    const double mean = s / n;
    const double se = std::sqrt(std::max(0.0, ss / n - mean * mean) / (n - 1.0));
    // Euler mean recursion is (1 - dt)^l x0; its gap to the exact flow is O(dt), far below 4 SE.
    const double target = oracle::linear_decay(0.5, grid.node(l));
    if (l > 0 && std::abs(mean - target) > 4.0 * se) {
      all_ok = false;
      INFO("node " << l << " mean " << mean << " target " << target << " se " << se);
      CHECK(false);
    }
  }
  CHECK(all_ok);
}

TEST_CASE("simulate_bundle: singleton, shape, and determinism across workers") {
  const auto model = builtin_model(1);
  const TimeGrid grid{5.0, 200};
  const auto one = simulate_bundle(model, grid, 1, 42);
  Stream rng(derive_seed(42, 0));
  const auto direct = simulate_path(model, grid, rng);
  REQUIRE(one.path(0).size() == direct.size());
  CHECK(std::equal(direct.begin(), direct.end(), one.path(0).begin()));

  const auto a = simulate_bundle(model, grid, 400, 42, 1);
  const auto b = simulate_bundle(model, grid, 400, 42, 8);
  CHECK(a.size() == 400);
  CHECK(a.values().size() == 400 * 201);
  CHECK(a == b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.path(i)[0] == 0.5);
  CHECK_FALSE(a == simulate_bundle(model, grid, 400, 43, 1));
  CHECK_THROWS_AS(simulate_bundle(model, grid, 0, 42), ParameterError);
}

TEST_CASE("built-in models") {
  const auto m1 = builtin_model(1), m2 = builtin_model(2), m3 = builtin_model(3);
  CHECK(m1.drift(1.0) == -1.0);
  CHECK(m2.drift(0.0) == 0.5);
  CHECK(m3.diffusion(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m3.drift(2.0) == m2.drift(2.0));
  for (const auto& m : {m1, m2, m3}) {
    CHECK(m.x0 == 0.5);
    CHECK(m.intensity == 0.5);
    CHECK(m.jumps.first_moment() == 0.0);
    CHECK(m.jumps.second_moment() == 1.0);
    CHECK(m.jump_coeff(3.0) == 1.0);
  }
  CHECK_THROWS_AS(builtin_model(0), ParameterError);
  CHECK_THROWS_AS(builtin_model(4), ParameterError);
}

TEST_CASE("bundle subsampling keeps every k-th node") {
  const auto bundle = simulate_bundle(builtin_model(2), TimeGrid{5.0, 400}, 5, 11);
  const auto coarse = bundle.subsample(2);
  CHECK(coarse.grid().steps == 200);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t l = 0; l <= 200; ++l) CHECK(coarse.path(i)[l] == bundle.path(i)[2 * l]);
  CHECK_THROWS_AS(bundle.subsample(3), ParameterError);
}
