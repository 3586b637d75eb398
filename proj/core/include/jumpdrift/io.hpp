#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jumpdrift/basis.hpp"
#include "jumpdrift/estimator.hpp"
#include "jumpdrift/metrics.hpp"
#include "jumpdrift/sde_sim.hpp"
#include "jumpdrift/selection.hpp"

namespace jumpdrift::io {

// Shortest decimal that round-trips to the same double (at most 17 digits).
std::string format_double(double v);

// Header t,p0,...,p{N-1}; one row per grid node.
void write_bundle_csv(std::ostream& out, const PathBundle& bundle);
void write_bundle_csv(const std::string& path, const PathBundle& bundle);

// Rebuilds the grid from the t column, which must start at 0 and be uniform.
PathBundle read_bundle_csv(std::istream& in, std::uint64_t seed = 0);
PathBundle read_bundle_csv(const std::string& path);

struct BundleMeta {
  std::optional<int> model_id;
  std::size_t n_paths = 0;
  std::size_t steps = 0;
  double horizon = 0.0;
  double intensity = 0.0;
  std::uint64_t seed = 0;
};

std::string bundle_meta_json(const BundleMeta& meta);
BundleMeta parse_bundle_meta(const std::string& text);

// "<csv path>.json".
std::string sidecar_path(const std::string& csv_path);

// JSON documents, 2-space indented, keys in a fixed order.
std::string fit_json(const DriftFit& fit, const Basis& basis);
std::string selection_json(const SelectionResult& result, const Basis& basis);
// Wall time is omitted unless requested so equal runs serialize identically.
std::string report_json(const ExperimentReport& report, bool include_timing = false);
std::string calibration_json(const CalibrationResult& result);
std::string trace_check_json(const TraceCheck& check, int model_id, std::size_t m);

// Rows "Mean MISE" and "StD MISE", one column per report.
void write_table_csv(std::ostream& out, const std::vector<const ExperimentReport*>& reports);
void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows);

void write_text(const std::string& path, const std::string& text);

}  // namespace jumpdrift::io
