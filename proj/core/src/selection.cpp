#include "jumpdrift/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jumpdrift/error.hpp"
#include "jumpdrift/linalg.hpp"

namespace jumpdrift {

std::string to_string(AdmissibleMode mode) {
  switch (mode) {
    case AdmissibleMode::plug_in: return "plug-in";
    case AdmissibleMode::simplified: return "simplified";
    case AdmissibleMode::all: return "all";
  }
  return "?";
}

AdmissibleMode parse_admissible_mode(const std::string& s) {
  if (s == "plug-in") return AdmissibleMode::plug_in;
  if (s == "simplified") return AdmissibleMode::simplified;
  if (s == "all") return AdmissibleMode::all;
  throw ParameterError("unknown admissible mode '" + s + "' (expected plug-in, simplified or all)");
}

std::string to_string(GateMode mode) { return mode == GateMode::theoretical ? "theoretical" : "singular-only"; }

GateMode parse_gate_mode(const std::string& s) {
  if (s == "theoretical") return GateMode::theoretical;
  if (s == "singular-only") return GateMode::singular_only;
  throw ParameterError("unknown gate mode '" + s + "' (expected theoretical or singular-only)");
}

void SelectionConfig::validate() const {
  if (dims.empty()) throw ParameterError("selection: candidate dimensions must be nonempty");
  for (auto m : dims) {
    if (m < 1) throw ParameterError("selection: candidate dimensions must be >= 1");
  }
  if (!(c_cal > 0.0) || !std::isfinite(c_cal)) throw ParameterError("selection: c_cal must be finite and > 0");
  if (f_sup_hat && !(*f_sup_hat > 0.0)) throw ParameterError("selection: f_sup_hat must be > 0");
  if (c_phi_sq && !(*c_phi_sq >= 1.0)) throw ParameterError("selection: c_phi_sq must be >= 1");
}

double estimate_density_sup(std::span<const double> samples, double lo, double hi) {
  if (!(lo < hi)) throw ParameterError("density: interval requires lo < hi");
  std::vector<double> inside;
  inside.reserve(samples.size());
  for (double x : samples) {
    if (x >= lo && x <= hi) inside.push_back(x);
  }
  if (inside.empty()) throw DegenerateDataError("density: no sample inside the estimation interval");

  std::sort(inside.begin(), inside.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(inside.size() - 1);
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    return k + 1 < inside.size() ? inside[k] + frac * (inside[k + 1] - inside[k]) : inside[k];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double fd_width = 2.0 * iqr / std::cbrt(static_cast<double>(inside.size()));

  constexpr std::size_t kMinBins = 50;
  constexpr std::size_t kMaxBins = 1000000;
  std::size_t bins = kMinBins;
  if (fd_width > 0.0) {
    const double want = std::ceil((hi - lo) / fd_width);
    bins = std::clamp(static_cast<std::size_t>(want), kMinBins, kMaxBins);
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : inside) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
    ++counts[b];
  }
  const auto peak = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(peak) / (static_cast<double>(samples.size()) * width);
}

double estimate_density_sup(const PathBundle& bundle, double lo, double hi) {
  const std::size_t n = bundle.grid().steps;
  std::vector<double> pooled;
  pooled.reserve(bundle.size() * n);
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const auto p = bundle.path(i);
    pooled.insert(pooled.end(), p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return estimate_density_sup(pooled, lo, hi);
}

double admissibility_constant(double horizon, double c_phi_sq, double f_sup) {
  const double c_t = truncation_constant(horizon);
  const double first = c_t / 2.0;
  const double second = 1.0 / (64.0 * c_phi_sq * horizon * (f_sup + std::sqrt(c_t / 2.0) / (3.0 * std::sqrt(c_phi_sq))));
  return std::min(first, second);
}

namespace {

std::vector<std::size_t> sorted_dims(const SelectionConfig& config, const Basis& basis) {
  config.validate();
  std::vector<std::size_t> dims = config.dims;
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  basis.check_dim(dims.back());
  return dims;
}

std::pair<double, double> density_window(const Basis& basis) {
  if (basis.kind() == BasisKind::hermite) return {-3.0, 3.0};
  return {basis.lo(), basis.hi()};
}

}  // namespace

AdmissibleSet admissible_dims(const EmpiricalMoments& moments, const PathBundle& bundle, const Basis& basis,
                              const SelectionConfig& config) {
  const auto dims = sorted_dims(config, basis);
  AdmissibleSet out;
  if (config.mode == AdmissibleMode::all) {
    out.dims = dims;
    out.threshold = std::numeric_limits<double>::infinity();
    return out;
  }
  const double c_phi_sq = config.c_phi_sq.value_or(basis.c_phi_sq());
  const double horizon = bundle.horizon();
  const double nt = static_cast<double>(bundle.size()) * horizon;
  if (!(nt > 1.0)) throw ParameterError("admissible set requires N*T > 1");
  if (config.mode == AdmissibleMode::plug_in) {
    const auto [lo, hi] = density_window(basis);
    out.f_sup_hat = config.f_sup_hat ? *config.f_sup_hat : estimate_density_sup(bundle, lo, hi);
    out.d_T = admissibility_constant(horizon, c_phi_sq, *out.f_sup_hat);
  } else {
    out.d_T = truncation_constant(horizon) / 2.0;
  }
  out.threshold = out.d_T * nt / std::log(nt);
  for (auto m : dims) {
    const double inv = inv_op_norm(moments.leading(m).gram);
    const double lhs = c_phi_sq * static_cast<double>(m) * std::max(inv * inv, 1.0);
    if (lhs <= out.threshold) out.dims.push_back(m);
  }
  if (out.dims.empty()) {
    out.dims.push_back(dims.front());
    out.fallback = true;
  }
  return out;
}

AdmissibleSet admissible_dims(const PathBundle& bundle, const Basis& basis, const SelectionConfig& config) {
  const auto dims = sorted_dims(config, basis);
  return admissible_dims(empirical_moments(bundle, basis, dims.back()), bundle, basis, config);
}

double penalty(std::size_t m, std::size_t n_paths, double horizon, double c_cal) {
  return c_cal * static_cast<double>(m) / (static_cast<double>(n_paths) * horizon);
}

std::size_t argmin_criterion(std::span<const double> criterion) {
  if (criterion.empty()) throw ParameterError("argmin over an empty criterion table");
  std::size_t best = 0;
  for (std::size_t k = 1; k < criterion.size(); ++k) {
    if (criterion[k] < criterion[best]) best = k;
  }
  return best;
}

SelectionResult select_model(const PathBundle& bundle, const Basis& basis, const SelectionConfig& config,
                             unsigned threads) {
  const auto dims = sorted_dims(config, basis);
  const auto moments = empirical_moments(bundle, basis, dims.back(), threads);

  SelectionResult result;
  result.candidates = dims;
  result.c_cal = config.c_cal;
  result.mode = config.mode;
  result.admissible = admissible_dims(moments, bundle, basis, config);

  std::vector<DriftFit> fits;
  for (auto m : result.admissible.dims) {
    fits.push_back(fit_from_moments(moments.leading(m), basis, bundle.size(), bundle.horizon(), config.gate));
    const double pen = penalty(m, bundle.size(), bundle.horizon(), config.c_cal);
    result.pen.push_back(pen);
    result.criterion.push_back(-fits.back().empirical_norm_sq + pen);
  }
  const std::size_t best = argmin_criterion(result.criterion);
  result.m_hat = result.admissible.dims[best];
  result.fit = std::move(fits[best]);
  return result;
}

}  // namespace jumpdrift
