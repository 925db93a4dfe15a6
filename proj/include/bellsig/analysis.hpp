#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bellsig/config.hpp"
#include "bellsig/ns_mle.hpp"
#include "bellsig/records.hpp"

namespace bellsig {

struct AnalysisReport {
  double S = 0.0;
  double sigma_stat = 0.0;
  double sigma_syst = 0.0;
  std::array<double, 4> correlators{};
  SignalingReport signaling;
  double accidental_rate = 0.0;  // Hz, from same-station coincidences
};

// Full analysis of a record stream. When the generating config is known,
// sigma_syst is the motor-precision budget for its stations and repetitions;
// otherwise it is 0.
AnalysisReport analyze(const std::vector<TrialRecord>& records,
                       const std::optional<ExperimentConfig>& config = std::nullopt);

}  // namespace bellsig
