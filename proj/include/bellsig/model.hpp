#pragma once

#include <array>
#include <numbers>

namespace bellsig {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Outcome index convention used throughout: 0 <-> +1, 1 <-> -1.
inline constexpr int outcome_sign(int index) { return index == 0 ? 1 : -1; }

// Polarization-entangled pair source, a mixture of |Phi+> (with relative
// phase) and white noise weighted by the interference visibility.
struct SourceState {
  double visibility = 0.994;
  double phase = 0.0;  // radians, between |HH> and |VV>
  double pair_rate = 200.0;  // Hz

  void validate() const;
};

// Half-wave-plate angles (radians) for each station's two settings.
// The analyzer (polarization) angle is twice the plate angle.
struct AnalyzerAngles {
  std::array<double, 2> alice_hwp{0.0, deg_to_rad(22.5)};
  std::array<double, 2> bob_hwp{deg_to_rad(11.25), deg_to_rad(33.75)};

  double alice_analyzer(int x) const { return 2.0 * alice_hwp[x]; }
  double bob_analyzer(int y) const { return 2.0 * bob_hwp[y]; }
  void validate() const;
};

// P(a, b) indexed [a][b] with the outcome index convention above.
using OutcomeTable = std::array<std::array<double, 2>, 2>;

// Joint outcome probabilities for analyzer angles alpha (Alice) and beta (Bob).
// Throws InputError on non-finite angles or an invalid state.
OutcomeTable outcome_probabilities(const SourceState& state, double alpha, double beta);

// E = sum_ab ab P(a,b).
double correlator(const SourceState& state, double alpha, double beta);

// S = E(0,0) - E(0,1) + E(1,0) + E(1,1).
double chsh_value(const SourceState& state, const AnalyzerAngles& angles);

// Sign of the (x, y) correlator in S.
inline constexpr double chsh_sign(int x, int y) { return (x == 0 && y == 1) ? -1.0 : 1.0; }

// One wave-plate positioning: setting block (x, y) repositions one Alice plate
// and one Bob plate, so there are eight independent instances per sweep.
struct PlateInstance {
  int x = 0;
  int y = 0;
  int station = 0;  // 0 = Alice, 1 = Bob
  double dE_dtheta = 0.0;  // derivative of E(x,y) w.r.t. that plate's HWP angle
};

// Ordered by block (0,0), (0,1), (1,0), (1,1); Alice before Bob in each block.
std::array<PlateInstance, 8> chsh_hwp_gradient(const SourceState& state,
                                               const AnalyzerAngles& angles);

}  // namespace bellsig
