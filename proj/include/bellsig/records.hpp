#pragma once

#include <array>
#include <cstdint>

namespace bellsig {

// One contiguous acquisition block for a single setting pair.
struct TrialRecord {
  std::uint64_t index = 0;
  double start_time = 0.0;  // seconds from run start
  double duration = 0.0;    // seconds
  int x = 0;
  int y = 0;
  std::array<std::int64_t, 4> counts{};  // n_pp, n_pm, n_mp, n_mm
  std::array<std::int64_t, 4> singles{};  // D1..D4 (Alice +, Alice -, Bob +, Bob -)
  std::array<std::int64_t, 2> same_station_coinc{};  // Alice pair, Bob pair

  double end_time() const { return start_time + duration; }
  // Count for outcome indices (a, b), 0 <-> +1.
  std::int64_t count(int a, int b) const { return counts[2 * a + b]; }

  // Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const TrialRecord&) const = default;
};

}  // namespace bellsig
