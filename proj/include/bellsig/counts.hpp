#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bellsig/records.hpp"

namespace bellsig {

// Aggregated coincidence counts n[x][y][a][b] (outcome index 0 <-> +1).
class CountsTable {
 public:
  std::int64_t at(int x, int y, int a, int b) const { return n_[flat(x, y, a, b)]; }
  std::int64_t& at(int x, int y, int a, int b) { return n_[flat(x, y, a, b)]; }

  std::int64_t total(int x, int y) const;
  std::int64_t grand_total() const;
  bool complete() const;
  // Throws ValidationError naming the first setting pair with no events.
  void require_complete() const;

  void add(const TrialRecord& record);
  CountsTable scaled(std::int64_t factor) const;

  const std::array<std::int64_t, 16>& raw() const { return n_; }
  bool operator==(const CountsTable&) const = default;

  static constexpr std::size_t flat(int x, int y, int a, int b) {
    return static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b);
  }

 private:
  std::array<std::int64_t, 16> n_{};
};

CountsTable tabulate(const std::vector<TrialRecord>& records);

}  // namespace bellsig
