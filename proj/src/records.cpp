#include "bellsig/records.hpp"

#include <cmath>
#include <string>

#include "bellsig/error.hpp"

namespace bellsig {

void TrialRecord::validate() const {
  if (!(std::isfinite(duration) && duration > 0.0))
    throw ValidationError("duration_s", "duration_s must be > 0");
  if (!std::isfinite(start_time) || start_time < 0.0)
    throw ValidationError("start_time_s", "start_time_s must be finite and >= 0");
  if (x < 0 || x > 1) throw ValidationError("x", "x must be 0 or 1");
  if (y < 0 || y > 1) throw ValidationError("y", "y must be 0 or 1");
  static constexpr const char* kCountKeys[4] = {"n_pp", "n_pm", "n_mp", "n_mm"};
  for (int i = 0; i < 4; ++i)
    if (counts[i] < 0)
      throw ValidationError(kCountKeys[i], std::string(kCountKeys[i]) + " must be >= 0");
  for (auto s : singles)
    if (s < 0) throw ValidationError("singles", "singles must be >= 0");
  for (auto c : same_station_coinc)
    if (c < 0) throw ValidationError("ss_coinc", "ss_coinc must be >= 0");
}

}  // namespace bellsig
