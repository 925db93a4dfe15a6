#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "bellsig/analysis.hpp"
#include "bellsig/budget.hpp"
#include "bellsig/error.hpp"
#include "bellsig/io.hpp"
#include "bellsig/series.hpp"
#include "bellsig/simulator.hpp"

namespace bellsig::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string records_path;
  double step = 0.0;
  std::optional<double> motor_sigma_deg;
  std::optional<int> reps;
  std::string param;
  std::string values;
  int runs = 1;
  std::string write_config;
};

ExperimentConfig load_config(const Options& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : parse_config_file(o.config_path);
  if (o.seed) cfg.rng_seed = *o.seed;
  cfg.validate();
  return cfg;
}

// Writes to --out atomically, or to the machine-output stream.
void emit(const Options& o, const std::string& content, std::ostream& out) {
  if (o.out_path.empty())
    out << content;
  else
    atomic_write(o.out_path, content);
}

// Splits on commas outside brackets, so "[1, 0.8],[1, 0.9]" yields two values.
std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  for (auto& v : out) {
    const auto a = v.find_first_not_of(' ');
    const auto b = v.find_last_not_of(' ');
    v = a == std::string::npos ? "" : v.substr(a, b - a + 1);
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_simulate(const Options& o, std::ostream& err) {
  const ExperimentConfig cfg = load_config(o);
  const SimulationOutput sim = simulate(cfg);
  write_records_file(sim.records, o.out_path);
  RunMetadata meta;
  meta.seed = sim.config.rng_seed;
  meta.warnings = sim.warnings;
  meta.config = sim.config;
  atomic_write(metadata_path(o.out_path), metadata_to_json(meta).dump(2) + "\n");
  for (const auto& w : sim.warnings) err << "warning: " << w << "\n";
  err << "simulate: wrote " << sim.records.size() << " records to " << o.out_path << "\n";
  return kSuccess;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto records = read_records_file(o.records_path);
  std::optional<ExperimentConfig> cfg;
  if (!o.config_path.empty())
    cfg = load_config(o);
  else if (auto meta = read_metadata_for(o.records_path))
    cfg = meta->config;
  const AnalysisReport report = analyze(records, cfg);
  emit(o, report_to_json(report).dump(2) + "\n", out);
  return kSuccess;
}

int cmd_series(const Options& o, std::ostream& out) {
  const auto records = read_records_file(o.records_path);
  std::ostringstream os;
  write_series_csv(cumulative_series(records, o.step), os);
  emit(o, os.str(), out);
  return kSuccess;
}

int cmd_budget(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_config(o);
  const std::array<double, 2> sigma =
      o.motor_sigma_deg ? std::array<double, 2>{deg_to_rad(*o.motor_sigma_deg), deg_to_rad(*o.motor_sigma_deg)}
                        : std::array<double, 2>{cfg.alice.motor_sigma, cfg.bob.motor_sigma};
  const int reps = o.reps ? *o.reps : cfg.schedule.repetitions;
  const double budget = motor_budget(sigma, reps, cfg.source, cfg.nominal_angles());
  nlohmann::ordered_json j;
  j["motor_sigma_deg"] = {rad_to_deg(sigma[0]), rad_to_deg(sigma[1])};
  j["repetitions"] = reps;
  j["visibility"] = cfg.source.visibility;
  j["sigma_syst"] = budget;
  j["gradient"] = nlohmann::ordered_json::array();
  for (const auto& inst : chsh_hwp_gradient(cfg.source, cfg.nominal_angles())) {
    nlohmann::ordered_json g;
    g["x"] = inst.x;
    g["y"] = inst.y;
    g["station"] = inst.station == 0 ? "alice" : "bob";
    g["dE_dtheta"] = inst.dE_dtheta;
    j["gradient"].push_back(g);
  }
  j["format_version"] = kFormatVersion;
  emit(o, j.dump(2) + "\n", out);
  return kSuccess;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_config(o);
  const CalibrationResult cal = calibrate_attenuators(cfg, cfg.calibration.tolerance);
  cfg.alice.attenuator = cal.alice_attenuator;
  cfg.bob.attenuator = cal.bob_attenuator;
  if (!cal.report.converged) err << "warning: attenuator calibration did not converge\n";
  emit(o, calibration_to_json(cal.report, cfg).dump(2) + "\n", out);
  if (!o.write_config.empty()) {
    cfg.calibration.enabled = false;
    atomic_write(o.write_config, serialize_config(cfg));
  }
  return kSuccess;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig base = load_config(o);
  if (o.runs < 1) throw ValidationError("--runs", "--runs must be >= 1");
  const auto values = split_values(o.values);
  if (values.empty()) throw ValidationError("--values", "--values is empty");
  // Reject a bad key or value before any simulation runs.
  for (const auto& v : values) {
    ExperimentConfig probe = base;
    set_config_value(probe, o.param, v);
    probe.validate();
  }

  std::ostringstream os;
  os << "param,value,runs,S_median,S_q16,S_q84,lr_sigma_median,lr_sigma_q16,lr_sigma_q84,sigma_syst\n";
  for (const auto& v : values) {
    std::vector<double> s_values, lr_values;
    double syst = 0.0;
    for (int r = 0; r < o.runs; ++r) {
      ExperimentConfig cfg = base;
      set_config_value(cfg, o.param, v);
      cfg.rng_seed = base.rng_seed + static_cast<std::uint64_t>(r);
      cfg.validate();
      const SimulationOutput sim = simulate(cfg);
      const AnalysisReport rep = analyze(sim.records, sim.config);
      s_values.push_back(rep.S);
      lr_values.push_back(rep.signaling.sigma);
      syst = rep.sigma_syst;
    }
    std::string shown = v;
    if (shown.find(',') != std::string::npos) shown = "\"" + shown + "\"";
    os << o.param << ',' << shown << ',' << o.runs << ',' << format_double(quantile(s_values, 0.5)) << ','
       << format_double(quantile(s_values, 0.16)) << ',' << format_double(quantile(s_values, 0.84)) << ','
       << format_double(quantile(lr_values, 0.5)) << ',' << format_double(quantile(lr_values, 0.16)) << ','
       << format_double(quantile(lr_values, 0.84)) << ',' << format_double(syst) << '\n';
    err << "sweep: " << o.param << " = " << v << " done (" << o.runs << " runs)\n";
  }
  emit(o, os.str(), out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photonic CHSH experiment simulator and signaling analysis", "bellsig"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", o.config_path, "configuration file (dotted keys)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the configured RNG seed");
    auto* opt = sub->add_option("--out", o.out_path, "output path");
    if (needs_out) opt->required();
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "run the experiment, write JSONL records");
  add_common(simulate_cmd, true);

  auto* analyze_cmd = app.add_subcommand("analyze", "analyze records, write a JSON report");
  add_common(analyze_cmd, false);
  analyze_cmd->add_option("--records", o.records_path, "JSONL records")->required()->check(CLI::ExistingFile);

  auto* series_cmd = app.add_subcommand("series", "cumulative time series as CSV");
  add_common(series_cmd, false);
  series_cmd->add_option("--records", o.records_path, "JSONL records")->required()->check(CLI::ExistingFile);
  series_cmd->add_option("--step", o.step, "step in seconds")->required();

  auto* budget_cmd = app.add_subcommand("budget", "motor-precision systematic budget");
  add_common(budget_cmd, false);
  budget_cmd->add_option("--motor-sigma-deg", o.motor_sigma_deg, "motor precision in degrees");
  budget_cmd->add_option("--reps", o.reps, "setting repetitions");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "balance detector paths with attenuators");
  add_common(calibrate_cmd, false);
  calibrate_cmd->add_option("--write-config", o.write_config, "write the calibrated config here");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over one config key");
  add_common(sweep_cmd, false);
  sweep_cmd->add_option("--param", o.param, "dotted config key, e.g. alice.detector_eff[1]")->required();
  sweep_cmd->add_option("--values", o.values, "comma-separated values")->required();
  sweep_cmd->add_option("--runs", o.runs, "runs per value");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(o, err);
    if (*analyze_cmd) return cmd_analyze(o, out);
    if (*series_cmd) return cmd_series(o, out);
    if (*budget_cmd) return cmd_budget(o, out);
    if (*calibrate_cmd) return cmd_calibrate(o, out, err);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << " (gradient norm " << e.gradient_norm() << ")\n";
    return kNonConvergence;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  }
  return kUsage;
}

}  // namespace bellsig::cli
