#include "jumpdrift/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "jumpdrift/error.hpp"

namespace jumpdrift::io {

namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& vs) {
  json a = json::array();
  for (double v : vs) a.push_back(number(v));
  return a;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ParseError("bundle CSV: invalid number '" + std::string(field) + "'", line);
  }
  return v;
}

std::string stats_key(const char* prefix, const char* name) { return std::string(prefix) + "_" + name; }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_bundle_csv(std::ostream& out, const PathBundle& bundle) {
  const auto& grid = bundle.grid();
  out << 't';
  for (std::size_t i = 0; i < bundle.size(); ++i) out << ",p" << i;
  out << '\n';
  for (std::size_t l = 0; l < grid.nodes(); ++l) {
    out << format_double(grid.node(l));
    for (std::size_t i = 0; i < bundle.size(); ++i) out << ',' << format_double(bundle.path(i)[l]);
    out << '\n';
  }
}

void write_bundle_csv(const std::string& path, const PathBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_bundle_csv(out, bundle);
  if (!out) throw Error("write to '" + path + "' failed");
}

PathBundle read_bundle_csv(std::istream& in, std::uint64_t seed) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("bundle CSV: missing header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "t") throw ParseError("bundle CSV: header must be t,p0,...", line_no);
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i] != "p" + std::to_string(i - 1)) throw ParseError("bundle CSV: unexpected column '" + std::string(header[i]) + "'", line_no);
  }
  const std::size_t n_paths = header.size() - 1;

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError("bundle CSV: expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    times.push_back(parse_number(fields[0], line_no));
    std::vector<double> row(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) row[i] = parse_number(fields[i + 1], line_no);
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw ParseError("bundle CSV: need at least two grid nodes", line_no);
  const std::size_t steps = rows.size() - 1;
  const double horizon = times.back();
  if (times.front() != 0.0 || !(horizon > 0.0)) throw ParseError("bundle CSV: time column must run from 0 to T > 0", 2);
  const TimeGrid grid{horizon, steps};
  for (std::size_t l = 0; l <= steps; ++l) {
    if (std::abs(times[l] - grid.node(l)) > 1e-9 * horizon) throw ParseError("bundle CSV: time grid is not uniform", l + 2);
  }
  std::vector<double> values(n_paths * grid.nodes());
  for (std::size_t l = 0; l <= steps; ++l)
    for (std::size_t i = 0; i < n_paths; ++i) values[i * grid.nodes() + l] = rows[l][i];
  return PathBundle(grid, n_paths, std::move(values), seed);
}

PathBundle read_bundle_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::uint64_t seed = 0;
  std::ifstream side(sidecar_path(path));
  if (side) {
    std::stringstream ss;
    ss << side.rdbuf();
    seed = parse_bundle_meta(ss.str()).seed;
  }
  return read_bundle_csv(in, seed);
}

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

std::string bundle_meta_json(const BundleMeta& meta) {
  json j;
  if (meta.model_id) j["model"] = *meta.model_id;
  j["N"] = meta.n_paths;
  j["n"] = meta.steps;
  j["T"] = meta.horizon;
  j["lambda"] = meta.intensity;
  j["seed"] = meta.seed;
  return j.dump(2) + "\n";
}

BundleMeta parse_bundle_meta(const std::string& text) {
  try {
    const auto j = json::parse(text);
    BundleMeta meta;
    if (j.contains("model")) meta.model_id = j.at("model").get<int>();
    meta.n_paths = j.at("N").get<std::size_t>();
    meta.steps = j.at("n").get<std::size_t>();
    meta.horizon = j.at("T").get<double>();
    meta.intensity = j.at("lambda").get<double>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bundle sidecar: ") + e.what(), 0);
  }
}

namespace {

json fit_object(const DriftFit& fit, const Basis& basis) {
  json j;
  j["basis"] = basis.name();
  if (basis.kind() == BasisKind::trigonometric) {
    j["interval"] = json::array({basis.lo(), basis.hi()});
  } else {
    j["interval"] = nullptr;
  }
  j["m"] = fit.m;
  j["theta"] = numbers(fit.theta);
  j["truncated"] = fit.truncated;
  j["gram_min_eig"] = number(fit.gram_min_eig);
  j["inv_op_norm"] = number(fit.inv_op_norm);
  j["gate_statistic"] = number(fit.gate_statistic);
  j["gate_threshold"] = number(fit.gate_threshold);
  j["empirical_norm_sq"] = number(fit.empirical_norm_sq);
  j["objective"] = number(fit.objective);
  return j;
}

void put_stats(json& j, const char* prefix, const SampleStats& st) {
  j[stats_key(prefix, "mean")] = number(st.mean);
  if (st.count > 1) {
    j[stats_key(prefix, "std")] = number(st.stddev);
  } else {
    j[stats_key(prefix, "std")] = nullptr;
  }
}

}  // namespace

std::string fit_json(const DriftFit& fit, const Basis& basis) { return fit_object(fit, basis).dump(2) + "\n"; }

std::string selection_json(const SelectionResult& r, const Basis& basis) {
  json j;
  j["candidates"] = r.candidates;
  j["admissible"] = r.admissible.dims;
  j["criterion"] = numbers(r.criterion);
  j["pen"] = numbers(r.pen);
  j["m_hat"] = r.m_hat;
  j["c_cal"] = r.c_cal;
  j["d_T_mode"] = to_string(r.mode);
  j["d_T"] = number(r.admissible.d_T);
  j["f_sup_hat"] = r.admissible.f_sup_hat ? number(*r.admissible.f_sup_hat) : json(nullptr);
  j["admissible_fallback"] = r.admissible.fallback;
  j["fit"] = fit_object(r.fit, basis);
  return j.dump(2) + "\n";
}

std::string report_json(const ExperimentReport& report, bool include_timing) {
  const auto& c = report.config;
  json cfg;
  cfg["model"] = c.model_id;
  cfg["N"] = c.n_paths;
  cfg["n"] = c.steps;
  cfg["T"] = c.horizon;
  cfg["lambda"] = c.intensity;
  cfg["basis"] = c.basis;
  cfg["interval"] = json::array({c.interval.lo, c.interval.hi});
  cfg["dims"] = c.dims;
  cfg["c_cal"] = c.c_cal;
  cfg["d_T_mode"] = to_string(c.admissible);
  cfg["gate"] = to_string(c.gate);
  cfg["reps"] = c.repetitions;
  cfg["seed"] = c.seed;
  cfg["mise_grid"] = c.mise_grid;

  json j;
  j["config"] = cfg;
  put_stats(j, "mise", report.mise_stats);
  put_stats(j, "m_hat", report.m_hat_stats);
  j["single_sample"] = report.mise_stats.count < 2;
  j["failures"] = report.failures;
  j["admissible_fallbacks"] = report.fallbacks;
  j["mise"] = numbers(report.mise);
  j["m_hat"] = numbers(report.m_hat);
  json errors = json::array();
  for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
    if (!report.repetitions[r].ok) errors.push_back({{"rep", r}, {"error", report.repetitions[r].error}});
  }
  j["errors"] = errors;
  if (include_timing) j["wall_time_s"] = report.wall_time_s;
  return j.dump(2) + "\n";
}

std::string calibration_json(const CalibrationResult& result) {
  json j;
  j["best_c_cal"] = result.best_c_cal;
  json table = json::array();
  for (const auto& row : result.table) {
    json r;
    r["c_cal"] = row.c_cal;
    put_stats(r, "mise", row.mise);
    put_stats(r, "m_hat", row.m_hat);
    table.push_back(r);
  }
  j["table"] = table;
  return j.dump(2) + "\n";
}

std::string trace_check_json(const TraceCheck& check, int model_id, std::size_t m) {
  json j;
  j["model"] = model_id;
  j["m"] = m;
  j["estimate"] = number(check.estimate);
  j["bound"] = number(check.bound);
  j["inconclusive"] = check.inconclusive;
  j["note"] = check.note;
  return j.dump(2) + "\n";
}

void write_table_csv(std::ostream& out, const std::vector<const ExperimentReport*>& reports) {
  out << "statistic";
  for (const auto* r : reports) out << ",Model " << r->config.model_id;
  out << "\nMean MISE";
  for (const auto* r : reports) out << ',' << format_double(r->mise_stats.mean);
  out << "\nStD MISE";
  for (const auto* r : reports) out << ',' << (r->mise_stats.count > 1 ? format_double(r->mise_stats.stddev) : "");
  out << '\n';
}

void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows) {
  out << "x,b,bhat\n";
  for (const auto& r : rows) out << format_double(r.x) << ',' << format_double(r.b) << ',' << format_double(r.bhat) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace jumpdrift::io
