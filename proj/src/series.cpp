#include "bellsig/series.hpp"

#include <cmath>

#include "bellsig/counts.hpp"
#include "bellsig/error.hpp"
#include "bellsig/estimators.hpp"
#include "bellsig/ns_mle.hpp"

namespace bellsig {

std::vector<SeriesPoint> cumulative_series(const std::vector<TrialRecord>& records, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InputError("series step must be > 0");
  double t_end = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0 && records[i].start_time < records[i - 1].start_time)
      throw InputError("records are not time-ordered at index " + std::to_string(i));
    t_end = std::max(t_end, records[i].end_time());
  }

  std::vector<SeriesPoint> out;
  if (records.empty()) return out;
  // Tolerate rounding in accumulated start times.
  const double eps = 1e-9 * std::max(1.0, t_end);
  const auto rows = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
  CountsTable table;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= rows; ++k) {
    SeriesPoint pt;
    // The last row covers all data and is stamped with the true end time.
    pt.elapsed = k == rows ? t_end : static_cast<double>(k) * step;
    while (next < records.size() && records[next].end_time() <= pt.elapsed + eps) table.add(records[next++]);
    if (!table.complete()) {
      pt.gap = true;
    } else {
      pt.S = estimate_chsh(table).S;
      pt.sigma_stat = sigma_stat(table);
      const SignalingReport rep = lr_test(table);
      pt.lr_sigma = rep.sigma;
      for (int i = 0; i < 4; ++i) pt.z[static_cast<std::size_t>(i)] = rep.naive[static_cast<std::size_t>(i)].z;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace bellsig
