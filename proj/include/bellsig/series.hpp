#pragma once

#include <array>
#include <vector>

#include "bellsig/records.hpp"

namespace bellsig {

struct SeriesPoint {
  double elapsed = 0.0;  // seconds
  bool gap = false;      // prefix lacked a setting pair; statistics unset
  double S = 0.0;
  double sigma_stat = 0.0;
  double lr_sigma = 0.0;
  std::array<double, 4> z{};  // A0, A1, B0, B1
};

// Analysis of the records completed by each multiple of `step`.
// Records must be time-ordered.
std::vector<SeriesPoint> cumulative_series(const std::vector<TrialRecord>& records, double step);

}  // namespace bellsig
