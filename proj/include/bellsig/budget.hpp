#pragma once

#include <array>

#include "bellsig/model.hpp"

namespace bellsig {

// Propagated uncertainty on S from wave-plate positioning errors: every one
// of the eight (setting block, station) positionings is an independent error
// of size motor_sigma (radians), averaged down by sqrt(repetitions).
double motor_budget(double motor_sigma, int repetitions, const SourceState& state,
                    const AnalyzerAngles& angles);

// Per-station motor precision, {alice, bob}.
double motor_budget(const std::array<double, 2>& station_sigma, int repetitions,
                    const SourceState& state, const AnalyzerAngles& angles);

}  // namespace bellsig
