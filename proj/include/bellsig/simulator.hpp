#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bellsig/config.hpp"
#include "bellsig/records.hpp"

namespace bellsig {

using Rng = std::mt19937_64;

// Positioning state of one motorized wave plate.
struct MotorState {
  MotorModel model = MotorModel::gaussian;
  double sigma = 0.0;
  double backlash_offset = 0.0;
  double position = 0.0;  // last reached angle, radians

  static MotorState for_station(const StationModel& s) {
    return {s.motor_model, s.motor_sigma, s.backlash_offset, 0.0};
  }
};

// Moves the plate to `target` and returns where it actually stopped.
// Every call is an independent repositioning.
double apply_motor_error(double target, MotorState& motor, Rng& rng);

// Pump-power factor over time. Random walks are stateful, so query times
// must be nondecreasing.
class DriftProcess {
 public:
  explicit DriftProcess(DriftModel model) : model_(model) {}
  // Mean factor over [t0, t1].
  double factor(double t0, double t1, Rng& rng);

 private:
  DriftModel model_;
  double walk_ = 0.0;
  double walk_time_ = 0.0;
};

struct PlateAngles {
  double alice = 0.0;  // actual HWP angles, radians
  double bob = 0.0;
};

struct RateTable {
  std::array<std::array<double, 2>, 2> coincidence{};  // [a][b], Hz
  std::array<double, 4> singles{};                     // D1..D4, Hz
  std::array<double, 2> same_station{};                // Alice pair, Bob pair, Hz
  bool clipped = false;  // some intermediate rate went negative and was set to 0
};

// Mean rates for setting (x, y) with plates at `actual` and pump factor `drift_factor`.
RateTable expected_rates(const ExperimentConfig& config, int x, int y, const PlateAngles& actual,
                         double drift_factor);

// Same, with the drift factor of a deterministic drift model at time t.
// Random-walk drift has no closed form and is rejected with InputError.
RateTable expected_rates_at(const ExperimentConfig& config, int x, int y, const PlateAngles& actual,
                            double t);

struct RunResult {
  std::vector<TrialRecord> records;
  std::vector<std::string> warnings;
};

// Schedules repetitions x 4 setting blocks and samples Poisson counts.
// Deterministic for a fixed config.rng_seed.
RunResult run_experiment(const ExperimentConfig& config);

struct GammaMeasurement {
  int station = 0;  // 0 = Alice, 1 = Bob
  double gamma = 0.0;        // coincidence rate, plate at 0 deg
  double gamma_prime = 0.0;  // plate at 45 deg
  double relative_asymmetry() const;
};

struct CalibrationReport {
  std::vector<GammaMeasurement> measurements;
  std::array<int, 2> iterations{};  // attenuator updates per station
  bool converged = true;
};

struct CalibrationResult {
  std::array<double, 2> alice_attenuator{};
  std::array<double, 2> bob_attenuator{};
  CalibrationReport report;
};

// Balances each station's two detection paths by attenuating the path with
// the higher coincidence rate until |gamma - gamma'| / mean <= tolerance.
CalibrationResult calibrate_attenuators(const ExperimentConfig& config, double tolerance);

// Background coincidence rate from same-station coincidences, averaged over
// the two stations. Reported only; never subtracted.
double accidental_estimate(const std::vector<TrialRecord>& records);

// Calibration (when enabled in the config) followed by the experiment.
struct SimulationOutput {
  ExperimentConfig config;  // with calibrated attenuators applied
  std::optional<CalibrationReport> calibration;
  std::vector<TrialRecord> records;
  std::vector<std::string> warnings;
};

SimulationOutput simulate(const ExperimentConfig& config);

}  // namespace bellsig
