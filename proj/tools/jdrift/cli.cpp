#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "jumpdrift/error.hpp"
#include "jumpdrift/estimator.hpp"
#include "jumpdrift/io.hpp"
#include "jumpdrift/linalg.hpp"
#include "jumpdrift/metrics.hpp"
#include "jumpdrift/parallel.hpp"
#include "jumpdrift/selection.hpp"

namespace jdrift {

namespace {

using namespace jumpdrift;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t parse_count(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || text.front() == '-') throw UsageError("not a count: '" + text + "'");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// "a:b" (inclusive range) or "a,b,c".
std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const auto a = parse_count(text.substr(0, colon));
    const auto b = parse_count(text.substr(colon + 1));
    if (a > b) throw UsageError("empty dimension range '" + text + "'");
    for (auto m = a; m <= b; ++m) dims.push_back(m);
  } else {
    for (const auto& item : split_list(text)) dims.push_back(parse_count(item));
  }
  return dims;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_models(const std::string& text) {
  if (text == "all") return {1, 2, 3};
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<int>(parse_count(item)));
  return out;
}

std::string json_to_arg(const std::string& key, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return io::format_double(v.get<double>());
  if (v.is_array()) {
    std::string joined;
    for (const auto& e : v) {
      if (!joined.empty()) joined += ',';
      joined += json_to_arg(key, e);
    }
    return joined;
  }
  throw UsageError("config: unsupported value for '" + key + "'");
}

// Keys are long option names without the dashes. Options given on the
// command line keep their value.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config '" + path + "': expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
    if (!opt) throw UsageError("config '" + path + "': unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(json_to_arg(key, value));
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config '" + path + "': " + key + ": " + e.what());
    }
  }
}

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string config;
  std::string output;
};

void add_common(CLI::App* sub, Common& c, std::uint64_t default_seed, const char* output_help) {
  c.seed = default_seed;
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--config", c.config, "JSON file of option values; flags take precedence");
  sub->add_option("-o,--output", c.output, output_help);
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

// report.json -> report_<suffix>
std::string derived_path(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::optional<io::BundleMeta> read_sidecar(const std::string& csv_path) {
  std::ifstream in(io::sidecar_path(csv_path));
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return io::parse_bundle_meta(ss.str());
}

PathBundle load_bundle(const std::string& path) {
  if (path.empty()) throw UsageError("a bundle CSV path is required");
  try {
    return io::read_bundle_csv(path);
  } catch (const jumpdrift::ParseError& e) {
    throw jumpdrift::ParseError(path + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  int model = 1;
  std::size_t n_paths = 400;
  std::size_t steps = 200;
  double horizon = 5.0;
  double lambda = 0.5;
};

void add_model_grid(CLI::App* sub, int& model, std::size_t& n_paths, std::size_t& steps, double& horizon,
                    double& lambda) {
  sub->add_option("--model", model, "Built-in model 1, 2 or 3")->capture_default_str();
  sub->add_option("--n-paths", n_paths, "Paths per bundle (N)")->capture_default_str();
  sub->add_option("--steps", steps, "Euler steps per path (n)")->capture_default_str();
  sub->add_option("--horizon", horizon, "Time horizon T")->capture_default_str();
  sub->add_option("--lambda", lambda, "Jump intensity")->capture_default_str();
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.common.output.empty()) throw UsageError("simulate: -o <path> is required");
  SdeModel model = builtin_model(a.model);
  model.intensity = a.lambda;
  std::vector<std::size_t> jumps;
  const auto bundle =
      simulate_bundle(model, TimeGrid{a.horizon, a.steps}, a.n_paths, a.common.seed, a.common.threads, &jumps);
  io::write_bundle_csv(a.common.output, bundle);
  io::BundleMeta meta;
  meta.model_id = a.model;
  meta.n_paths = a.n_paths;
  meta.steps = a.steps;
  meta.horizon = a.horizon;
  meta.intensity = a.lambda;
  meta.seed = a.common.seed;
  io::write_text(io::sidecar_path(a.common.output), io::bundle_meta_json(meta));

  const auto total = std::accumulate(jumps.begin(), jumps.end(), std::size_t{0});
  out << "wrote " << a.common.output << ": N=" << a.n_paths << " n=" << a.steps << " T=" << io::format_double(a.horizon)
      << " jumps=" << total << " (mean " << fixed(static_cast<double>(total) / static_cast<double>(a.n_paths), 3)
      << " per path, max " << *std::max_element(jumps.begin(), jumps.end()) << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  Common common;
  std::string input;
  std::size_t m = 0;
  bool adaptive = false;
  double c_cal = kCalibratedCcal;
  std::string dims = "1:6";
  std::string basis = "trig";
  double lo = -3.0;
  double hi = 3.0;
  std::string gate = "singular-only";
  std::string d_t_mode = "all";
  std::size_t plot_grid = 0;
  std::string plot_out;
  int model = 0;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.adaptive == (a.m > 0)) throw UsageError("estimate: give exactly one of --m <dim> or --adaptive");
  std::string plot_path = a.plot_out;
  if (a.plot_grid > 0 && plot_path.empty()) {
    if (a.common.output.empty()) throw UsageError("estimate: --plot-grid needs --plot-out or -o");
    plot_path = derived_path(a.common.output, "_plot.csv");
  }
  const Basis basis = make_basis(a.basis, a.lo, a.hi);
  const GateMode gate = parse_gate_mode(a.gate);
  const auto bundle = load_bundle(a.input);

  DriftFit fit;
  std::string text;
  if (a.adaptive) {
    SelectionConfig cfg;
    cfg.dims = parse_dims(a.dims);
    cfg.c_cal = a.c_cal;
    cfg.mode = parse_admissible_mode(a.d_t_mode);
    cfg.gate = gate;
    const auto sel = select_model(bundle, basis, cfg, a.common.threads);
    if (sel.admissible.fallback) {
      err << "warning: no candidate dimension passed the admissibility check; fell back to m = "
          << sel.admissible.dims.front() << "\n";
    }
    fit = sel.fit;
    text = io::selection_json(sel, basis);
  } else {
    fit = fit_projection(bundle, basis, a.m, gate);
    text = io::fit_json(fit, basis);
  }
  if (fit.truncated) err << "warning: the Gram matrix failed the stability check; the estimate is set to zero\n";
  write_or_print(a.common.output, text, out);

  if (a.plot_grid > 0) {
    int model_id = a.model;
    if (model_id == 0) {
      if (const auto meta = read_sidecar(a.input); meta && meta->model_id) model_id = *meta->model_id;
    }
    std::function<double(double)> b = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
    if (model_id != 0) b = builtin_model(model_id).drift;
    std::ostringstream csv;
    io::write_plot_csv(csv, plot_data(fit, basis, b, Interval{a.lo, a.hi}, a.plot_grid));
    io::write_text(plot_path, csv.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  Common common;
  std::string models = "1";
  std::size_t reps = 100;
  std::size_t n_paths = 400;
  std::size_t steps = 200;
  double horizon = 5.0;
  double lambda = 0.5;
  std::string basis = "trig";
  double lo = -3.0;
  double hi = 3.0;
  std::string dims = "1:6";
  double c_cal = kCalibratedCcal;
  std::string gate = "singular-only";
  std::string d_t_mode = "all";
  std::size_t mise_grid = 1000;
  std::string table;
  std::string plots;
  bool timing = false;
  bool calibrate = false;
  std::string grid = "0.25,0.5,1,2,4,8";
};

// Rows of estimations kept for plotting per model.
constexpr std::size_t kPlotReps = 10;

ExperimentConfig experiment_config(const ExperimentArgs& a, int model_id) {
  ExperimentConfig c;
  c.model_id = model_id;
  c.n_paths = a.n_paths;
  c.steps = a.steps;
  c.horizon = a.horizon;
  c.intensity = a.lambda;
  c.basis = a.basis;
  c.interval = {a.lo, a.hi};
  c.dims = parse_dims(a.dims);
  c.c_cal = a.c_cal;
  c.admissible = parse_admissible_mode(a.d_t_mode);
  c.gate = parse_gate_mode(a.gate);
  c.repetitions = a.reps;
  c.seed = a.common.seed;
  c.mise_grid = a.mise_grid;
  c.plot_reps = a.plots.empty() ? 0 : std::min(kPlotReps, a.reps);
  c.validate();
  return c;
}

void print_table(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << std::left << std::setw(14) << "";
  for (const auto& r : reports) out << std::right << std::setw(12) << ("Model " + std::to_string(r.config.model_id));
  out << "\n";
  const auto row = [&](const char* name, auto get) {
    out << std::left << std::setw(14) << name;
    for (const auto& r : reports) out << std::right << std::setw(12) << get(r);
    out << "\n";
  };
  const auto sd = [](const SampleStats& s) { return s.count > 1 ? fixed(s.stddev) : std::string("-"); };
  row("Mean MISE", [](const ExperimentReport& r) { return fixed(r.mise_stats.mean); });
  row("StD MISE", [&](const ExperimentReport& r) { return sd(r.mise_stats); });
  row("Mean m_hat", [](const ExperimentReport& r) { return fixed(r.m_hat_stats.mean, 2); });
  row("StD m_hat", [&](const ExperimentReport& r) { return sd(r.m_hat_stats); });
  row("reps ok", [](const ExperimentReport& r) { return std::to_string(r.mise.size()); });
  if (std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.mise_stats.count < 2; })) {
    out << "(single sample: StD not available)\n";
  }
}

int cmd_calibrate(const ExperimentArgs& a, std::ostream& out) {
  const auto models = parse_models(a.models);
  if (models.size() != 1) throw UsageError("experiment --calibrate takes a single --model");
  const auto cfg = experiment_config(a, models.front());
  const auto result = calibrate_c_cal(cfg, parse_doubles(a.grid), a.common.threads);
  out << std::left << std::setw(10) << "c_cal" << std::right << std::setw(12) << "Mean MISE" << std::setw(12)
      << "StD MISE" << std::setw(12) << "Mean m_hat" << "\n";
  for (const auto& row : result.table) {
    out << std::left << std::setw(10) << io::format_double(row.c_cal) << std::right << std::setw(12)
        << fixed(row.mise.mean) << std::setw(12) << fixed(row.mise.stddev) << std::setw(12) << fixed(row.m_hat.mean, 2)
        << "\n";
  }
  out << "chosen c_cal = " << io::format_double(result.best_c_cal) << "\n";
  if (!a.common.output.empty()) io::write_text(a.common.output, io::calibration_json(result));
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  if (a.calibrate) return cmd_calibrate(a, out);
  std::vector<ExperimentConfig> configs;
  for (int id : parse_models(a.models)) configs.push_back(experiment_config(a, id));

  std::vector<ExperimentReport> reports;
  for (const auto& c : configs) reports.push_back(run_experiment(c, a.common.threads));

  std::string text;
  if (reports.size() == 1) {
    text = io::report_json(reports.front(), a.timing);
  } else {
    json all;
    all["reports"] = json::array();
    for (const auto& r : reports) all["reports"].push_back(json::parse(io::report_json(r, a.timing)));
    text = all.dump(2) + "\n";
  }
  write_or_print(a.common.output, text, out);

  std::string table_path = a.table;
  if (table_path.empty() && !a.common.output.empty()) table_path = derived_path(a.common.output, "_table.csv");
  if (!table_path.empty()) {
    std::vector<const ExperimentReport*> ptrs;
    for (const auto& r : reports) ptrs.push_back(&r);
    std::ostringstream csv;
    io::write_table_csv(csv, ptrs);
    io::write_text(table_path, csv.str());
  }

  if (!a.plots.empty()) {
    fs::create_directories(a.plots);
    for (const auto& r : reports) {
      const Basis basis = r.config.make_basis();
      const auto b = r.config.model().drift;
      for (std::size_t k = 0; k < r.config.plot_reps; ++k) {
        const auto& rep = r.repetitions[k];
        if (!rep.ok) continue;
        std::ostringstream csv;
        io::write_plot_csv(csv, plot_data(rep.fit, basis, b, r.config.interval, r.config.mise_grid));
        const auto name = "model" + std::to_string(r.config.model_id) + "_rep" + std::to_string(k) + ".csv";
        io::write_text((fs::path(a.plots) / name).string(), csv.str());
      }
    }
  }

  // The summary goes to stderr when the JSON report is on stdout.
  std::ostream& summary = a.common.output.empty() ? err : out;
  print_table(summary, reports);
  if (a.timing) {
    for (const auto& r : reports)
      summary << "model " << r.config.model_id << ": " << fixed(r.wall_time_s, 2) << " s\n";
  }
  int status = kExitOk;
  for (const auto& r : reports) {
    for (const auto& rep : r.repetitions) {
      if (!rep.ok) err << "model " << r.config.model_id << ": repetition failed: " << rep.error << "\n";
    }
    if (r.mise.empty()) {
      err << "model " << r.config.model_id << ": every repetition failed\n";
      status = kExitFailure;
    }
  }
  return status;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  Common common;
  std::string models = "1";
  std::string dims = "2,4,6";
  std::size_t reps = 500;
  std::size_t n_paths = 20;
  std::size_t steps = 200;
  double horizon = 5.0;
  double lambda = 0.5;
  std::string basis = "trig";
  double lo = -3.0;
  double hi = 3.0;
  double slack = 1.2;
  std::string bundle;
};

struct CheckLine {
  std::string status;  // PASS, FAIL or WARN
  std::string name;
  std::string detail;
};

std::vector<CheckLine> bundle_checks(const PathBundle& bundle, const Basis& basis, const std::vector<std::size_t>& dims) {
  std::vector<CheckLine> lines;
  const auto pass = [](bool ok) { return std::string(ok ? "PASS" : "FAIL"); };
  bool finite = std::all_of(bundle.values().begin(), bundle.values().end(), [](double v) { return std::isfinite(v); });
  lines.push_back({pass(finite), "bundle finite", "N=" + std::to_string(bundle.size()) + " n=" +
                                                      std::to_string(bundle.grid().steps)});
  const std::size_t m_max = *std::max_element(dims.begin(), dims.end());
  const auto moments = empirical_moments(bundle, basis, m_max);
  for (auto m : dims) {
    const auto gram = moments.gram.leading_block(m);
    const double lmin = sym_eigen_min(gram);
    const double tol = 1e-10 * std::max(gram.max_diagonal(), 1e-300);
    lines.push_back({pass(lmin >= -tol), "gram psd m=" + std::to_string(m), "lambda_min=" + io::format_double(lmin)});
  }
  if (basis.kind() == BasisKind::trigonometric) {
    // Psi_11 is the occupation fraction of [lo, hi] divided by its width.
    std::size_t inside = 0;
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      const auto p = bundle.path(i);
      for (std::size_t l = 0; l < bundle.grid().steps; ++l) inside += (p[l] >= basis.lo() && p[l] <= basis.hi());
    }
    const double expect = static_cast<double>(inside) /
                          static_cast<double>(bundle.size() * bundle.grid().steps) / (basis.hi() - basis.lo());
    const double got = moments.gram(0, 0);
    lines.push_back({pass(std::abs(got - expect) <= 1e-12 * std::max(1.0, expect)), "gram occupation",
                     "psi11=" + io::format_double(got) + " expected=" + io::format_double(expect)});
  }
  return lines;
}

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const Basis basis = make_basis(a.basis, a.lo, a.hi);
  const auto dims = parse_dims(a.dims);
  if (!(a.slack >= 1.0)) throw UsageError("check: --slack must be >= 1");
  std::vector<CheckLine> lines;
  json results = json::array();

  if (!a.bundle.empty()) {
    for (auto& line : bundle_checks(load_bundle(a.bundle), basis, dims)) lines.push_back(std::move(line));
  }
  for (int id : parse_models(a.models)) {
    SdeModel model = builtin_model(id);
    model.intensity = a.lambda;
    for (auto m : dims) {
      const auto tc =
          trace_bound_check(model, basis, m, a.reps, a.n_paths, TimeGrid{a.horizon, a.steps}, a.common.seed, a.common.threads);
      std::string status = tc.estimate <= a.slack * tc.bound ? "PASS" : "FAIL";
      if (tc.inconclusive) status = "WARN";
      lines.push_back({status, "trace model=" + std::to_string(id) + " m=" + std::to_string(m),
                       "estimate=" + fixed(tc.estimate) + " bound=" + fixed(tc.bound) +
                           (tc.inconclusive ? " (" + tc.note + ")" : std::string())});
      results.push_back(json::parse(io::trace_check_json(tc, id, m)));
    }
  }

  int status = kExitOk;
  for (const auto& line : lines) {
    out << line.status << "  " << line.name << "  " << line.detail << "\n";
    if (line.status == "FAIL") status = kExitFailure;
    if (line.status == "WARN") err << "warning: " << line.name << " is inconclusive\n";
  }
  if (!a.common.output.empty()) {
    json j;
    j["checks"] = json::array();
    for (const auto& line : lines) j["checks"].push_back({{"status", line.status}, {"name", line.name}, {"detail", line.detail}});
    j["trace"] = results;
    io::write_text(a.common.output, j.dump(2) + "\n");
  }
  return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drift estimation for jump diffusions from repeated paths", "jdrift"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a bundle of Euler paths to CSV");
  add_common(simulate, sim.common, 42, "Bundle CSV (a .json sidecar is written next to it)");
  add_model_grid(simulate, sim.model, sim.n_paths, sim.steps, sim.horizon, sim.lambda);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Fit the drift from a bundle CSV");
  add_common(estimate, est.common, 0, "JSON result (stdout when omitted)");
  estimate->add_option("input,--input", est.input, "Bundle CSV");
  estimate->add_option("--m", est.m, "Fixed dimension");
  estimate->add_flag("--adaptive", est.adaptive, "Penalized choice of the dimension");
  estimate->add_option("--c-cal", est.c_cal, "Penalty constant")->capture_default_str();
  estimate->add_option("--dims", est.dims, "Candidate dimensions, a:b or a,b,c")->capture_default_str();
  estimate->add_option("--basis", est.basis, "trig or hermite")->capture_default_str();
  estimate->add_option("--lo", est.lo, "Interval lower end")->capture_default_str();
  estimate->add_option("--hi", est.hi, "Interval upper end")->capture_default_str();
  estimate->add_option("--gate", est.gate, "theoretical or singular-only")->capture_default_str();
  estimate->add_option("--d-t-mode", est.d_t_mode, "plug-in, simplified or all")->capture_default_str();
  estimate->add_option("--plot-grid", est.plot_grid, "Write a plot CSV on this many intervals");
  estimate->add_option("--plot-out", est.plot_out, "Plot CSV path (default <output>_plot.csv)");
  estimate->add_option("--model", est.model, "True drift for the plot (default from the sidecar)");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo MISE study or c_cal calibration");
  add_common(experiment, exp.common, 7, "Report JSON (stdout when omitted)");
  experiment->add_option("--model", exp.models, "Model ids: 1, 2, 3, a list or all")->capture_default_str();
  experiment->add_option("--reps", exp.reps, "Repetitions")->capture_default_str();
  experiment->add_option("--n-paths", exp.n_paths, "Paths per bundle (N)")->capture_default_str();
  experiment->add_option("--steps", exp.steps, "Euler steps per path (n)")->capture_default_str();
  experiment->add_option("--horizon", exp.horizon, "Time horizon T")->capture_default_str();
  experiment->add_option("--lambda", exp.lambda, "Jump intensity")->capture_default_str();
  experiment->add_option("--basis", exp.basis, "trig or hermite")->capture_default_str();
  experiment->add_option("--lo", exp.lo, "Interval lower end")->capture_default_str();
  experiment->add_option("--hi", exp.hi, "Interval upper end")->capture_default_str();
  experiment->add_option("--dims", exp.dims, "Candidate dimensions")->capture_default_str();
  experiment->add_option("--c-cal", exp.c_cal, "Penalty constant")->capture_default_str();
  experiment->add_option("--gate", exp.gate, "theoretical or singular-only")->capture_default_str();
  experiment->add_option("--d-t-mode", exp.d_t_mode, "plug-in, simplified or all")->capture_default_str();
  experiment->add_option("--mise-grid", exp.mise_grid, "MISE quadrature intervals")->capture_default_str();
  experiment->add_option("--table", exp.table, "Table CSV (default <output>_table.csv)");
  experiment->add_option("--plots", exp.plots, "Directory for plot CSVs of the first 10 repetitions");
  experiment->add_flag("--timing", exp.timing, "Record wall time");
  experiment->add_flag("--calibrate", exp.calibrate, "Choose c_cal from --grid by mean MISE");
  experiment->add_option("--grid", exp.grid, "c_cal candidates for --calibrate")->capture_default_str();

  CheckArgs chk;
  auto* check = app.add_subcommand("check", "Monte Carlo property checks");
  add_common(check, chk.common, 1, "JSON results");
  check->add_option("--model", chk.models, "Model ids: 1, 2, 3, a list or all")->capture_default_str();
  check->add_option("--dims", chk.dims, "Dimensions to check")->capture_default_str();
  check->add_option("--reps", chk.reps, "Bundles per trace estimate")->capture_default_str();
  check->add_option("--n-paths", chk.n_paths, "Paths per bundle (N)")->capture_default_str();
  check->add_option("--steps", chk.steps, "Euler steps per path (n)")->capture_default_str();
  check->add_option("--horizon", chk.horizon, "Time horizon T")->capture_default_str();
  check->add_option("--lambda", chk.lambda, "Jump intensity")->capture_default_str();
  check->add_option("--basis", chk.basis, "trig or hermite")->capture_default_str();
  check->add_option("--lo", chk.lo, "Interval lower end")->capture_default_str();
  check->add_option("--hi", chk.hi, "Interval upper end")->capture_default_str();
  check->add_option("--slack", chk.slack, "Allowed ratio of estimate to bound")->capture_default_str();
  check->add_option("--bundle", chk.bundle, "Also check the Gram properties of this bundle CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      if (!sim.common.config.empty()) apply_config(*simulate, sim.common.config);
      return cmd_simulate(sim, out);
    }
    if (estimate->parsed()) {
      if (!est.common.config.empty()) apply_config(*estimate, est.common.config);
      return cmd_estimate(est, out, err);
    }
    if (experiment->parsed()) {
      if (!exp.common.config.empty()) apply_config(*experiment, exp.common.config);
      return cmd_experiment(exp, out, err);
    }
    if (!chk.common.config.empty()) apply_config(*check, chk.common.config);
    return cmd_check(chk, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const jumpdrift::ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const jumpdrift::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace jdrift
