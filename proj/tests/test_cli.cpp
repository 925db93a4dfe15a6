#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bellsig/io.hpp"
#include "bellsig/model.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;

namespace bellsig {
namespace {

const fs::path kPresets = fs::path(BELLSIG_SOURCE_DIR) / "presets";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bellsig_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_cfg(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(Cli, SimulateWritesRecordsAndMetadata) {
  const std::string out = scratch("default.jsonl").string();
  const Result r = run_cli({"simulate", "--seed", "1", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(read_records_file(out).size(), 4u);
  const auto meta = read_metadata_for(out);
  ASSERT_TRUE(meta.has_value());
  EXPECT_EQ(meta->seed, 1u);
  EXPECT_EQ(meta->tool_version, kToolVersion);

  const std::string reps = write_cfg("reps.cfg", "schedule.repetitions = 200\nschedule.block_s = 5\n");
  ASSERT_EQ(run_cli({"simulate", "--config", reps, "--out", out}).code, 0);
  EXPECT_EQ(read_records_file(out).size(), 800u);
}

TEST(Cli, AnalyzeIsDeterministic) {
  const std::string recs = scratch("det.jsonl").string();
  ASSERT_EQ(run_cli({"simulate", "--config", (kPresets / "experiment_b.cfg").string(), "--seed", "5", "--out", recs}).code, 0);
  const Result a = run_cli({"analyze", "--records", recs});
  const Result b = run_cli({"analyze", "--records", recs});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  // sigma_syst comes from the sidecar config: 0.02 deg, 10 repetitions.
  EXPECT_NEAR(j["sigma_syst"].get<double>(), 8.0 * 0.994 * deg_to_rad(0.02) / std::sqrt(10.0), 1e-12);

  const std::string again = scratch("det2.jsonl").string();
  ASSERT_EQ(run_cli({"simulate", "--config", (kPresets / "experiment_b.cfg").string(), "--seed", "5", "--out", again}).code, 0);
  std::ifstream f1(recs), f2(again);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(f1), {}), std::string(std::istreambuf_iterator<char>(f2), {}));
}

TEST(Cli, AnalyzeMissingSettingFails) {
  const fs::path p = scratch("partial.jsonl");
  std::ofstream(p) << R"({"index":0,"start_time_s":0,"duration_s":1,"x":0,"y":0,"n_pp":1,"n_pm":2,"n_mp":3,"n_mm":4,"singles":[0,0,0,0],"ss_coinc":[0,0]})"
                   << "\n";
  fs::remove(metadata_path(p));
  const Result r = run_cli({"analyze", "--records", p.string()});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("(0,1)"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, AnalyzeModelFixture) {
  // Counts proportional to the model at the optimal angles, 2e5 per setting.
  const SourceState src;
  const AnalyzerAngles ang;
  std::vector<TrialRecord> recs;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      TrialRecord r;
      r.index = recs.size();
      r.start_time = 1000.0 * static_cast<double>(recs.size());
      r.duration = 1000.0;
      r.x = x;
      r.y = y;
      const OutcomeTable p = outcome_probabilities(src, ang.alice_analyzer(x), ang.bob_analyzer(y));
      for (int k = 0; k < 4; ++k) r.counts[k] = std::llround(p[k / 2][k % 2] * 2e5);
      recs.push_back(r);
    }
  const fs::path path = scratch("model.jsonl");
  fs::remove(metadata_path(path));
  write_records_file(recs, path);
  const Result r = run_cli({"analyze", "--records", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["S"].get<double>(), 2.8115, 1e-4);
  EXPECT_LT(j["signaling"]["sigma"].get<double>(), 1e-3);
  EXPECT_EQ(j["sigma_syst"].get<double>(), 0.0);
}

TEST(Cli, AsymmetricEfficiencyFixtureSignals) {
  const std::string cfg = write_cfg("asym.cfg", "alice.detector_eff = [1.0, 0.8]\nseed = 2024\n");
  const std::string recs = scratch("asym.jsonl").string();
  ASSERT_EQ(run_cli({"simulate", "--config", cfg, "--out", recs}).code, 0);
  std::int64_t events = 0;
  for (const auto& r : read_records_file(recs)) events += r.counts[0] + r.counts[1] + r.counts[2] + r.counts[3];
  EXPECT_NEAR(static_cast<double>(events), 8e5, 0.15 * 8e5);
  const Result r = run_cli({"analyze", "--records", recs});
  ASSERT_EQ(r.code, 0);
  EXPECT_GT(nlohmann::json::parse(r.out)["signaling"]["sigma"].get<double>(), 10.0);
}

TEST(Cli, SeriesRowsAndFinalRow) {
  const std::string cfg = write_cfg("series.cfg", "schedule.repetitions = 10\nschedule.block_s = 100\n");
  const std::string recs = scratch("series.jsonl").string();
  ASSERT_EQ(run_cli({"simulate", "--config", cfg, "--out", recs}).code, 0);

  const Result s = run_cli({"series", "--records", recs, "--step", "100"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto rows = csv_rows(s.out);
  ASSERT_EQ(rows.size(), 41u);
  EXPECT_EQ(s.out.substr(0, s.out.find('\n')), kSeriesHeader);
  EXPECT_EQ(rows[1].size(), 8u);
  EXPECT_TRUE(rows[1][1].empty());

  const Result whole = run_cli({"series", "--records", recs, "--step", "4000"});
  const auto one = csv_rows(whole.out);
  ASSERT_EQ(one.size(), 2u);
  const auto j = nlohmann::json::parse(run_cli({"analyze", "--records", recs}).out);
  EXPECT_EQ(std::stod(one[1][1]), j["S"].get<double>());
  EXPECT_EQ(std::stod(one[1][2]), j["sigma_stat"].get<double>());
  EXPECT_EQ(std::stod(one[1][3]), j["signaling"]["sigma"].get<double>());

  EXPECT_EQ(run_cli({"series", "--records", recs, "--step", "0"}).code, cli::kValidation);
}

TEST(Cli, SeriesOnExperimentAFinalRow) {
  const std::string recs = scratch("exp_a.jsonl").string();
  ASSERT_EQ(run_cli({"simulate", "--config", (kPresets / "experiment_a.cfg").string(), "--seed", "11", "--out", recs}).code, 0);
  const auto rows = csv_rows(run_cli({"series", "--records", recs, "--step", "1000"}).out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_GT(std::stod(rows.back()[3]), 20.0);
}

TEST(Cli, BudgetForPresetD) {
  const Result r = run_cli({"budget", "--config", (kPresets / "experiment_d.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const double b = nlohmann::json::parse(r.out)["sigma_syst"].get<double>();
  EXPECT_GE(b, 1e-4);
  EXPECT_LE(b, 3e-4);
  const Result flags = run_cli({"budget", "--motor-sigma-deg", "0.2", "--reps", "1"});
  const auto j = nlohmann::json::parse(flags.out);
  EXPECT_NEAR(j["sigma_syst"].get<double>(), 8.0 * 0.994 * deg_to_rad(0.2), 1e-15);
  EXPECT_EQ(j["gradient"].size(), 8u);
  EXPECT_EQ(run_cli({"budget", "--reps", "0"}).code, cli::kValidation);
}

TEST(Cli, CalibrateWritesBalancedConfig) {
  const std::string cfg = write_cfg("cal.cfg", "alice.detector_eff = [1.0, 0.8]\ncalibration.block_s = 10000\n");
  const std::string written = scratch("cal_out.cfg").string();
  const Result r = run_cli({"calibrate", "--config", cfg, "--write-config", written});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  const ExperimentConfig c = parse_config_file(written);
  const double p0 = c.alice.detector_eff[0] * c.alice.attenuator[0];
  const double p1 = c.alice.detector_eff[1] * c.alice.attenuator[1];
  EXPECT_LE(std::abs(p0 - p1) / (0.5 * (p0 + p1)), 0.01);
}

TEST(Cli, SweepSingleRunMatchesSimulateAnalyze) {
  const std::string cfg = write_cfg("sw.cfg", "alice.detector_eff = [1.0, 0.9]\nseed = 8\n");
  const Result sw = run_cli({"sweep", "--config", cfg, "--param", "alice.motor_sigma_deg", "--values", "0.1", "--runs", "1"});
  ASSERT_EQ(sw.code, 0) << sw.err;
  const auto rows = csv_rows(sw.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "param");

  const std::string cfg2 = write_cfg("sw2.cfg", "alice.detector_eff = [1.0, 0.9]\nseed = 8\nalice.motor_sigma_deg = 0.1\n");
  const std::string recs = scratch("sw.jsonl").string();
  ASSERT_EQ(run_cli({"simulate", "--config", cfg2, "--out", recs}).code, 0);
  const auto j = nlohmann::json::parse(run_cli({"analyze", "--records", recs}).out);
  EXPECT_EQ(std::stod(rows[1][3]), j["S"].get<double>());
  EXPECT_EQ(std::stod(rows[1][6]), j["signaling"]["sigma"].get<double>());
  EXPECT_EQ(std::stod(rows[1][9]), j["sigma_syst"].get<double>());
}

TEST(Cli, SweepRejectsUnknownKey) {
  const Result r = run_cli({"sweep", "--param", "alice.nonexistent", "--values", "1", "--runs", "1"});
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, SweepEfficiencyAsymmetryIsMonotone) {
  const Result r = run_cli({"sweep", "--param", "alice.detector_eff[1]", "--values", "1.0,0.9,0.8", "--runs", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double median = std::stod(rows[i][6]);
    EXPECT_GE(median, prev) << rows[i][1];
    prev = median;
  }
}

TEST(Cli, SweepRepetitionsBudgetScaling) {
  const std::string cfg = write_cfg("swreps.cfg",
                                    "alice.motor_sigma_deg = 0.02\nbob.motor_sigma_deg = 0.02\nschedule.total_per_setting_s = 100\n");
  const Result r = run_cli({"sweep", "--config", cfg, "--param", "schedule.repetitions", "--values", "1,10,200", "--runs", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  const double b1 = std::stod(rows[1][9]);
  EXPECT_NEAR(std::stod(rows[2][9]) * std::sqrt(10.0) / b1, 1.0, 1e-12);
  EXPECT_NEAR(std::stod(rows[3][9]) * std::sqrt(200.0) / b1, 1.0, 1e-12);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"simulate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"simulate", "analyze", "--out", "x"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"analyze", "--records", "/nonexistent/file.jsonl"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"series", "--records", (kPresets / "experiment_a.cfg").string()}).code, cli::kUsage);
}

TEST(Cli, InvalidConfigExitsWithValidation) {
  const std::string bad = write_cfg("bad.cfg", "schedule.repetitions = 0\n");
  const Result r = run_cli({"simulate", "--config", bad, "--out", scratch("never.jsonl").string()});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("schedule.repetitions"), std::string::npos) << r.err;
}

TEST(Cli, UnwritableOutputIsIoFailure) {
  const Result r = run_cli({"simulate", "--out", "/nonexistent_dir/records.jsonl"});
  EXPECT_EQ(r.code, cli::kIoFailure);
}

}  // namespace
}  // namespace bellsig
