#include "bellsig/model.hpp"

#include <cmath>
#include <string>

#include "bellsig/error.hpp"

namespace bellsig {

void SourceState::validate() const {
  if (!std::isfinite(visibility) || visibility < 0.0 || visibility > 1.0)
    throw InputError("visibility must lie in [0, 1], got " + std::to_string(visibility));
  if (!std::isfinite(phase)) throw InputError("phase must be finite");
  if (!std::isfinite(pair_rate) || pair_rate < 0.0)
    throw InputError("pair_rate must be nonnegative, got " + std::to_string(pair_rate));
}

void AnalyzerAngles::validate() const {
  for (double a : alice_hwp)
    if (!std::isfinite(a)) throw InputError("non-finite Alice HWP angle");
  for (double b : bob_hwp)
    if (!std::isfinite(b)) throw InputError("non-finite Bob HWP angle");
}

namespace {

// Interference term cos2a cos2b + cos(phi) sin2a sin2b.
double interference(double phase, double alpha, double beta) {
  return std::cos(2.0 * alpha) * std::cos(2.0 * beta) +
         std::cos(phase) * std::sin(2.0 * alpha) * std::sin(2.0 * beta);
}

}  // namespace

OutcomeTable outcome_probabilities(const SourceState& state, double alpha, double beta) {
  state.validate();
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw InputError("analyzer angle must be finite");
  const double e = state.visibility * interference(state.phase, alpha, beta);
  OutcomeTable p{};
  p[0][0] = p[1][1] = 0.25 * (1.0 + e);
  p[0][1] = p[1][0] = 0.25 * (1.0 - e);
  return p;
}

double correlator(const SourceState& state, double alpha, double beta) {
  const OutcomeTable p = outcome_probabilities(state, alpha, beta);
  double e = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) e += outcome_sign(a) * outcome_sign(b) * p[a][b];
  return e;
}

double chsh_value(const SourceState& state, const AnalyzerAngles& angles) {
  angles.validate();
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      s += chsh_sign(x, y) *
           correlator(state, angles.alice_analyzer(x), angles.bob_analyzer(y));
  return s;
}

std::array<PlateInstance, 8> chsh_hwp_gradient(const SourceState& state,
                                               const AnalyzerAngles& angles) {
  state.validate();
  angles.validate();
  const double v = state.visibility;
  const double cphi = std::cos(state.phase);
  std::array<PlateInstance, 8> out{};
  std::size_t k = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double al = angles.alice_analyzer(x);
      const double be = angles.bob_analyzer(y);
      // d(analyzer)/d(hwp) = 2, and d(cos 2a)/da = -2 sin 2a.
      const double d_alice =
          4.0 * v * (-std::sin(2 * al) * std::cos(2 * be) + cphi * std::cos(2 * al) * std::sin(2 * be));
      const double d_bob =
          4.0 * v * (-std::cos(2 * al) * std::sin(2 * be) + cphi * std::sin(2 * al) * std::cos(2 * be));
      out[k++] = PlateInstance{x, y, 0, d_alice};
      out[k++] = PlateInstance{x, y, 1, d_bob};
    }
  }
  return out;
}

}  // namespace bellsig
