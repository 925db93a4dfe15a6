#include "bellsig/budget.hpp"

#include <cmath>

#include "bellsig/error.hpp"

namespace bellsig {

double motor_budget(double motor_sigma, int repetitions, const SourceState& state,
                    const AnalyzerAngles& angles) {
  return motor_budget({motor_sigma, motor_sigma}, repetitions, state, angles);
}

double motor_budget(const std::array<double, 2>& station_sigma, int repetitions,
                    const SourceState& state, const AnalyzerAngles& angles) {
  for (double s : station_sigma)
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("motor sigma must be finite and >= 0");
  if (repetitions < 1) throw InputError("repetitions must be >= 1");
  double var = 0.0;
  for (const PlateInstance& inst : chsh_hwp_gradient(state, angles)) {
    const double d = inst.dE_dtheta * station_sigma[static_cast<std::size_t>(inst.station)];
    var += d * d;
  }
  return std::sqrt(var) / std::sqrt(static_cast<double>(repetitions));
}

}  // namespace bellsig
