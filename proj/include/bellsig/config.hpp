#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "bellsig/model.hpp"

namespace bellsig {

enum class MotorModel { gaussian, uniform, backlash };

struct StationModel {
  std::array<double, 2> hwp_targets{};  // radians
  double motor_sigma = 0.0;             // radians, 1 sigma
  MotorModel motor_model = MotorModel::gaussian;
  double backlash_offset = 0.0;         // radians
  double coupling_kappa = 0.0;          // relative loss per radian of mispositioning
  std::array<double, 2> detector_eff{1.0, 1.0};  // outcome +1, -1
  std::array<double, 2> attenuator{1.0, 1.0};
  double dark_rate = 500.0;  // Hz per detector

  double outcome_weight(int outcome) const { return detector_eff[outcome] * attenuator[outcome]; }
  bool operator==(const StationModel&) const = default;
};

enum class DriftKind { none, linear, random_walk };

struct DriftModel {
  DriftKind kind = DriftKind::none;
  double slope = 0.0;       // fractional change per second (linear)
  double step_sigma = 0.0;  // fractional change per sqrt(second) (random_walk)
  double floor = 0.01;      // drift factor never drops below this

  bool operator==(const DriftModel&) const = default;
};

enum class AcquisitionMode { four_detector, single_detector_sequential };

using SettingPair = std::pair<int, int>;

struct ScheduleConfig {
  std::array<SettingPair, 4> setting_order{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
  double block_duration = 1000.0;  // seconds per setting per sweep
  int repetitions = 1;
  // When > 0, each setting gets this much time in total, split evenly
  // over the repetitions (block_duration is then ignored).
  double total_per_setting = 0.0;
  AcquisitionMode acquisition_mode = AcquisitionMode::four_detector;

  double effective_block() const {
    return total_per_setting > 0.0 ? total_per_setting / repetitions : block_duration;
  }
  bool operator==(const ScheduleConfig&) const = default;
};

// Attenuator balancing run before the experiment when enabled.
struct CalibrationSettings {
  bool enabled = false;
  double tolerance = 0.01;
  double block_duration = 1000.0;  // seconds per gamma measurement
  int max_iterations = 10;

  bool operator==(const CalibrationSettings&) const = default;
};

struct ExperimentConfig {
  SourceState source{};
  DriftModel drift{};
  StationModel alice = default_alice();
  StationModel bob = default_bob();
  ScheduleConfig schedule{};
  CalibrationSettings calibration{};
  double accidental_rate = 0.1;      // Hz
  double coincidence_window = 3e-9;  // seconds
  std::uint64_t rng_seed = 1;

  AnalyzerAngles nominal_angles() const { return {alice.hwp_targets, bob.hwp_targets}; }
  const StationModel& station(int s) const { return s == 0 ? alice : bob; }
  StationModel& station(int s) { return s == 0 ? alice : bob; }

  // Throws ValidationError naming the offending dotted key.
  void validate() const;

  static StationModel default_alice() {
    StationModel m;
    m.hwp_targets = AnalyzerAngles{}.alice_hwp;
    return m;
  }
  static StationModel default_bob() {
    StationModel m;
    m.hwp_targets = AnalyzerAngles{}.bob_hwp;
    return m;
  }
};

bool operator==(const SourceState& a, const SourceState& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace bellsig
