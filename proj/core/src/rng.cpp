#include "jumpdrift/rng.hpp"

#include <cmath>

namespace jumpdrift {

double Stream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::uint64_t Stream::poisson(double mean) noexcept {
  constexpr double kChunk = 32.0;
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double mu = mean > kChunk ? kChunk : mean;
    mean -= mu;
    // Inversion: walk the cdf until it exceeds one uniform draw.
    double p = std::exp(-mu);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= mu / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

}  // namespace jumpdrift
