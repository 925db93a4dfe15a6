#include "bellsig/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellsig/error.hpp"

namespace bellsig {

namespace {

constexpr double kQuarterTurn = kPi / 4.0;  // HWP rotation that swaps the PBS outputs

std::int64_t sample_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

double coupling(double kappa, double actual, double nominal, bool& clipped) {
  const double c = 1.0 - kappa * std::abs(actual - nominal);
  if (c < 0.0) {
    clipped = true;
    return 0.0;
  }
  return c;
}

// Rates for plates at `actual` (nominal positions `nominal`) and outcome
// weights w_alice/w_bob. Shared by both acquisition modes.
RateTable channel_rates(const ExperimentConfig& cfg, const PlateAngles& actual,
                        const PlateAngles& nominal, const std::array<double, 2>& w_alice,
                        const std::array<double, 2>& w_bob, double drift_factor) {
  RateTable r;
  if (drift_factor < 0.0) {
    r.clipped = true;
    drift_factor = 0.0;
  }
  const OutcomeTable p = outcome_probabilities(cfg.source, 2.0 * actual.alice, 2.0 * actual.bob);
  const double c_alice = coupling(cfg.alice.coupling_kappa, actual.alice, nominal.alice, r.clipped);
  const double c_bob = coupling(cfg.bob.coupling_kappa, actual.bob, nominal.bob, r.clipped);
  const double emitted = cfg.source.pair_rate * drift_factor;
  const double tau = cfg.coincidence_window;
  const double dark_a = cfg.alice.dark_rate;
  const double dark_b = cfg.bob.dark_rate;

  std::array<double, 2> true_alice{}, true_bob{};
  for (int i = 0; i < 2; ++i) {
    true_alice[i] = emitted * c_alice * (p[i][0] + p[i][1]) * w_alice[i];
    true_bob[i] = emitted * c_bob * (p[0][i] + p[1][i]) * w_bob[i];
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double pairs = emitted * c_alice * c_bob * p[a][b] * w_alice[a] * w_bob[b];
      const double dark_coinc =
          tau * (dark_a * true_bob[b] + true_alice[a] * dark_b + dark_a * dark_b);
      r.coincidence[a][b] = pairs + cfg.accidental_rate / 4.0 + dark_coinc;
    }
  }
  for (int i = 0; i < 2; ++i) {
    r.singles[i] = true_alice[i] + dark_a;
    r.singles[2 + i] = true_bob[i] + dark_b;
  }
  r.same_station[0] = cfg.accidental_rate + tau * r.singles[0] * r.singles[1];
  r.same_station[1] = cfg.accidental_rate + tau * r.singles[2] * r.singles[3];
  return r;
}

std::array<double, 2> station_weights(const StationModel& s) {
  return {s.outcome_weight(0), s.outcome_weight(1)};
}

double deterministic_drift(const DriftModel& d, double t) {
  switch (d.kind) {
    case DriftKind::none:
      return 1.0;
    case DriftKind::linear:
      return std::max(d.floor, 1.0 + d.slope * t);
    case DriftKind::random_walk:
      break;
  }
  throw InputError("random-walk drift has no deterministic value at a fixed time");
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

double apply_motor_error(double target, MotorState& motor, Rng& rng) {
  double actual = target;
  switch (motor.model) {
    case MotorModel::gaussian:
      if (motor.sigma > 0.0) actual += std::normal_distribution<double>(0.0, motor.sigma)(rng);
      break;
    case MotorModel::uniform:
      if (motor.sigma > 0.0) {
        const double half = std::sqrt(3.0) * motor.sigma;
        actual += std::uniform_real_distribution<double>(-half, half)(rng);
      }
      break;
    case MotorModel::backlash: {
      const double direction = target >= motor.position ? 1.0 : -1.0;
      actual += direction * motor.backlash_offset;
      if (motor.sigma > 0.0) actual += std::normal_distribution<double>(0.0, motor.sigma)(rng);
      break;
    }
  }
  motor.position = actual;
  return actual;
}

double DriftProcess::factor(double t0, double t1, Rng& rng) {
  const double mid = 0.5 * (t0 + t1);
  switch (model_.kind) {
    case DriftKind::none:
      return 1.0;
    case DriftKind::linear:
      return std::max(model_.floor, 1.0 + model_.slope * mid);
    case DriftKind::random_walk: {
      const double dt = mid - walk_time_;
      if (dt > 0.0 && model_.step_sigma > 0.0)
        walk_ += std::normal_distribution<double>(0.0, model_.step_sigma * std::sqrt(dt))(rng);
      walk_time_ = std::max(walk_time_, mid);
      return std::max(model_.floor, 1.0 + walk_);
    }
  }
  return 1.0;
}

RateTable expected_rates(const ExperimentConfig& config, int x, int y, const PlateAngles& actual,
                         double drift_factor) {
  if (x < 0 || x > 1 || y < 0 || y > 1) throw InputError("settings must be 0 or 1");
  const PlateAngles nominal{config.alice.hwp_targets[x], config.bob.hwp_targets[y]};
  return channel_rates(config, actual, nominal, station_weights(config.alice),
                       station_weights(config.bob), drift_factor);
}

RateTable expected_rates_at(const ExperimentConfig& config, int x, int y, const PlateAngles& actual,
                            double t) {
  return expected_rates(config, x, y, actual, deterministic_drift(config.drift, t));
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunResult out;
  Rng rng(config.rng_seed);
  DriftProcess drift(config.drift);
  MotorState motor_a = MotorState::for_station(config.alice);
  MotorState motor_b = MotorState::for_station(config.bob);

  const double block = config.schedule.effective_block();
  const bool sequential =
      config.schedule.acquisition_mode == AcquisitionMode::single_detector_sequential;
  bool clipped = false;
  double t = 0.0;
  std::uint64_t index = 0;
  out.records.reserve(static_cast<std::size_t>(config.schedule.repetitions) * 4);

  for (int rep = 0; rep < config.schedule.repetitions; ++rep) {
    for (const auto& [x, y] : config.schedule.setting_order) {
      TrialRecord rec;
      rec.index = index++;
      rec.start_time = t;
      rec.duration = block;
      rec.x = x;
      rec.y = y;
      const double target_a = config.alice.hwp_targets[x];
      const double target_b = config.bob.hwp_targets[y];

      if (!sequential) {
        const PlateAngles actual{apply_motor_error(target_a, motor_a, rng),
                                 apply_motor_error(target_b, motor_b, rng)};
        const double f = drift.factor(t, t + block, rng);
        const RateTable r = expected_rates(config, x, y, actual, f);
        clipped |= r.clipped;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) rec.counts[2 * a + b] = sample_poisson(r.coincidence[a][b] * block, rng);
        for (int d = 0; d < 4; ++d) rec.singles[d] = sample_poisson(r.singles[d] * block, rng);
        for (int s = 0; s < 2; ++s)
          rec.same_station_coinc[s] = sample_poisson(r.same_station[s] * block, rng);
      } else {
        // One detector per station: outcome -1 is measured by rotating the
        // plate a quarter turn, one outcome pair per sub-block.
        const double sub = block / 4.0;
        const std::array<double, 2> w_a{config.alice.outcome_weight(0), config.alice.outcome_weight(0)};
        const std::array<double, 2> w_b{config.bob.outcome_weight(0), config.bob.outcome_weight(0)};
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const double t0 = t + sub * (2 * a + b);
            const PlateAngles nominal{target_a + a * kQuarterTurn, target_b + b * kQuarterTurn};
            const PlateAngles actual{apply_motor_error(nominal.alice, motor_a, rng),
                                     apply_motor_error(nominal.bob, motor_b, rng)};
            const double f = drift.factor(t0, t0 + sub, rng);
            const RateTable r = channel_rates(config, actual, nominal, w_a, w_b, f);
            clipped |= r.clipped;
            rec.counts[2 * a + b] = sample_poisson(r.coincidence[0][0] * sub, rng);
            rec.singles[a] += sample_poisson(r.singles[0] * sub, rng);
            rec.singles[2 + b] += sample_poisson(r.singles[2] * sub, rng);
          }
        }
      }
      out.records.push_back(rec);
      t += block;
    }
  }
  if (clipped) out.warnings.emplace_back("negative intermediate rate clipped to 0");
  return out;
}

double GammaMeasurement::relative_asymmetry() const {
  const double mean = 0.5 * (gamma + gamma_prime);
  return mean > 0.0 ? std::abs(gamma - gamma_prime) / mean : 0.0;
}

CalibrationResult calibrate_attenuators(const ExperimentConfig& config, double tolerance) {
  config.validate();
  if (!(tolerance >= 0.0)) throw InputError("calibration tolerance must be >= 0");
  ExperimentConfig cfg = config;
  CalibrationResult result;
  Rng rng(derived_seed(config.rng_seed, 0xca11b));
  const double block = config.calibration.block_duration;
  const int max_iter = config.calibration.max_iterations;

  for (int station = 0; station < 2; ++station) {
    const int partner = 1 - station;
    MotorState motor = MotorState::for_station(cfg.station(station));
    MotorState partner_motor = MotorState::for_station(cfg.station(partner));

    // Coincidences of both detectors of `station` with the partner's +1 detector.
    auto measure = [&](double plate) {
      const double here = apply_motor_error(plate, motor, rng);
      const double there = apply_motor_error(0.0, partner_motor, rng);
      const PlateAngles actual = station == 0 ? PlateAngles{here, there} : PlateAngles{there, here};
      const PlateAngles nominal = station == 0 ? PlateAngles{plate, 0.0} : PlateAngles{0.0, plate};
      const RateTable r = channel_rates(cfg, actual, nominal, station_weights(cfg.alice),
                                        station_weights(cfg.bob), 1.0);
      std::int64_t n = 0;
      for (int i = 0; i < 2; ++i)
        n += sample_poisson((station == 0 ? r.coincidence[i][0] : r.coincidence[0][i]) * block, rng);
      return static_cast<double>(n) / block;
    };

    for (int iter = 0;; ++iter) {
      GammaMeasurement m{station, measure(0.0), measure(kQuarterTurn)};
      result.report.measurements.push_back(m);
      if (m.relative_asymmetry() <= tolerance) break;
      if (iter >= max_iter || m.gamma <= 0.0 || m.gamma_prime <= 0.0) {
        result.report.converged = false;
        break;
      }
      auto& att = cfg.station(station).attenuator;
      if (m.gamma > m.gamma_prime)
        att[0] *= m.gamma_prime / m.gamma;
      else
        att[1] *= m.gamma / m.gamma_prime;
      ++result.report.iterations[station];
    }
  }
  result.alice_attenuator = cfg.alice.attenuator;
  result.bob_attenuator = cfg.bob.attenuator;
  return result;
}

double accidental_estimate(const std::vector<TrialRecord>& records) {
  double total_time = 0.0;
  double events = 0.0;
  for (const auto& r : records) {
    total_time += r.duration;
    events += static_cast<double>(r.same_station_coinc[0] + r.same_station_coinc[1]);
  }
  if (!(total_time > 0.0)) throw InputError("accidental estimate needs a positive total duration");
  return events / total_time / 2.0;
}

SimulationOutput simulate(const ExperimentConfig& config) {
  config.validate();
  SimulationOutput out;
  out.config = config;
  if (config.calibration.enabled) {
    CalibrationResult cal = calibrate_attenuators(config, config.calibration.tolerance);
    out.config.alice.attenuator = cal.alice_attenuator;
    out.config.bob.attenuator = cal.bob_attenuator;
    if (!cal.report.converged)
      out.warnings.emplace_back("attenuator calibration did not converge");
    out.calibration = std::move(cal.report);
  }
  RunResult run = run_experiment(out.config);
  out.records = std::move(run.records);
  out.warnings.insert(out.warnings.end(), run.warnings.begin(), run.warnings.end());
  return out;
}

}  // namespace bellsig
