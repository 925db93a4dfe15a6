#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bellsig/analysis.hpp"
#include "bellsig/config.hpp"
#include "bellsig/records.hpp"
#include "bellsig/series.hpp"
#include "bellsig/simulator.hpp"

namespace bellsig {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// ---- trial records (JSON Lines) ----

// One record per line, fixed field order. Returns bytes written.
std::size_t write_records(const std::vector<TrialRecord>& records, std::ostream& out);
// Throws ParseError (malformed line) or ValidationError (invariant broken);
// both messages carry the 1-based line number.
std::vector<TrialRecord> read_records(std::istream& in);

std::size_t write_records_file(const std::vector<TrialRecord>& records,
                               const std::filesystem::path& path);
std::vector<TrialRecord> read_records_file(const std::filesystem::path& path);

// ---- configuration (dotted keys, "key = value" per line, '#' comments) ----

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Sets one key from its textual value. Array keys accept an element index,
// e.g. "alice.detector_eff[1]". Throws ValidationError on unknown keys or
// values of the wrong shape. Does not run ExperimentConfig::validate.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

// Canonical text form: every key, fixed order, angles in degrees.
std::string serialize_config(const ExperimentConfig& config);

// ---- reports and series ----

nlohmann::ordered_json report_to_json(const AnalysisReport& report);
nlohmann::ordered_json calibration_to_json(const CalibrationReport& report,
                                           const ExperimentConfig& calibrated);

inline constexpr const char* kSeriesHeader = "elapsed_s,S,sigma_stat,lr_sigma,z_A0,z_A1,z_B0,z_B1";
// Gap rows carry the elapsed time and empty statistic fields.
void write_series_csv(const std::vector<SeriesPoint>& series, std::ostream& out);

// ---- run bundle metadata (sidecar "<records>.meta.json") ----

struct RunMetadata {
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::string created_utc;
  std::vector<std::string> warnings;
  ExperimentConfig config;  // as run, calibrated attenuators applied
};

std::filesystem::path metadata_path(const std::filesystem::path& records_path);
nlohmann::ordered_json metadata_to_json(const RunMetadata& meta);
RunMetadata metadata_from_json(const nlohmann::json& j);
std::optional<RunMetadata> read_metadata_for(const std::filesystem::path& records_path);

// Writes to a temporary sibling and renames over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace bellsig
