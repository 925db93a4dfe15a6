#include "bellsig/counts.hpp"

#include <numeric>
#include <string>

#include "bellsig/error.hpp"

namespace bellsig {

std::int64_t CountsTable::total(int x, int y) const {
  const auto first = n_.begin() + static_cast<std::ptrdiff_t>(flat(x, y, 0, 0));
  return std::accumulate(first, first + 4, std::int64_t{0});
}

std::int64_t CountsTable::grand_total() const {
  return std::accumulate(n_.begin(), n_.end(), std::int64_t{0});
}

bool CountsTable::complete() const {
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      if (total(x, y) <= 0) return false;
  return true;
}

void CountsTable::require_complete() const {
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      if (total(x, y) <= 0) {
        const std::string pair = "(" + std::to_string(x) + "," + std::to_string(y) + ")";
        throw ValidationError("setting" + pair, "no events for setting pair " + pair);
      }
}

void CountsTable::add(const TrialRecord& record) {
  if (record.x < 0 || record.x > 1 || record.y < 0 || record.y > 1)
    throw ValidationError("x", "record settings must be 0 or 1");
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const std::int64_t c = record.count(a, b);
      if (c < 0) throw ValidationError("counts", "negative count in record " + std::to_string(record.index));
      at(record.x, record.y, a, b) += c;
    }
}

CountsTable CountsTable::scaled(std::int64_t factor) const {
  CountsTable out;
  for (std::size_t i = 0; i < n_.size(); ++i) out.n_[i] = n_[i] * factor;
  return out;
}

CountsTable tabulate(const std::vector<TrialRecord>& records) {
  CountsTable t;
  for (const auto& r : records) t.add(r);
  return t;
}

}  // namespace bellsig
