#include "bellsig/config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellsig/error.hpp"

namespace bellsig {

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ValidationError(key, key + ": " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool unit_interval_open_left(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }

void validate_station(const StationModel& s, const std::string& name) {
  for (double t : s.hwp_targets) require(std::isfinite(t), name + ".hwp_deg", "angles must be finite");
  require(finite_nonneg(s.motor_sigma), name + ".motor_sigma_deg", "must be >= 0");
  require(std::isfinite(s.backlash_offset), name + ".backlash_deg", "must be finite");
  require(finite_nonneg(s.coupling_kappa), name + ".coupling_kappa", "must be >= 0");
  for (double e : s.detector_eff)
    require(unit_interval_open_left(e), name + ".detector_eff", "entries must lie in (0, 1]");
  for (double t : s.attenuator)
    require(unit_interval_open_left(t), name + ".attenuator", "entries must lie in (0, 1]");
  require(finite_nonneg(s.dark_rate), name + ".dark_rate_hz", "must be >= 0");
}

}  // namespace

bool operator==(const SourceState& a, const SourceState& b) {
  return a.visibility == b.visibility && a.phase == b.phase && a.pair_rate == b.pair_rate;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.source == b.source && a.drift == b.drift && a.alice == b.alice && a.bob == b.bob &&
         a.schedule == b.schedule && a.calibration == b.calibration &&
         a.accidental_rate == b.accidental_rate &&
         a.coincidence_window == b.coincidence_window && a.rng_seed == b.rng_seed;
}

void ExperimentConfig::validate() const {
  require(std::isfinite(source.visibility) && source.visibility >= 0.0 && source.visibility <= 1.0,
          "source.visibility", "must lie in [0, 1]");
  require(finite_nonneg(source.pair_rate), "source.pair_rate_hz", "must be >= 0");
  require(std::isfinite(source.phase), "source.phase_deg", "must be finite");

  require(std::isfinite(drift.slope), "drift.slope_per_s", "must be finite");
  require(finite_nonneg(drift.step_sigma), "drift.step_sigma_per_sqrt_s", "must be >= 0");
  require(std::isfinite(drift.floor) && drift.floor > 0.0, "drift.floor", "must be > 0");

  validate_station(alice, "alice");
  validate_station(bob, "bob");

  require(schedule.repetitions >= 1, "schedule.repetitions", "must be >= 1");
  require(std::isfinite(schedule.block_duration) && schedule.block_duration > 0.0, "schedule.block_s",
          "must be > 0");
  require(finite_nonneg(schedule.total_per_setting), "schedule.total_per_setting_s", "must be >= 0");
  std::array<bool, 4> seen{};
  for (const auto& [x, y] : schedule.setting_order) {
    require(x >= 0 && x <= 1 && y >= 0 && y <= 1, "schedule.order", "settings must be 0 or 1");
    require(!seen[2 * x + y], "schedule.order", "each setting pair must appear exactly once");
    seen[2 * x + y] = true;
  }

  require(calibration.tolerance > 0.0 && std::isfinite(calibration.tolerance), "calibration.tolerance",
          "must be > 0");
  require(calibration.block_duration > 0.0 && std::isfinite(calibration.block_duration),
          "calibration.block_s", "must be > 0");
  require(calibration.max_iterations >= 0, "calibration.max_iterations", "must be >= 0");

  require(finite_nonneg(accidental_rate), "accidental_rate_hz", "must be >= 0");
  require(std::isfinite(coincidence_window) && coincidence_window > 0.0, "coincidence_window_s",
          "must be > 0");
}

}  // namespace bellsig
