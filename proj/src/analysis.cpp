#include "bellsig/analysis.hpp"

#include "bellsig/budget.hpp"
#include "bellsig/counts.hpp"
#include "bellsig/estimators.hpp"
#include "bellsig/simulator.hpp"

namespace bellsig {

AnalysisReport analyze(const std::vector<TrialRecord>& records,
                       const std::optional<ExperimentConfig>& config) {
  const CountsTable table = tabulate(records);
  table.require_complete();
  AnalysisReport r;
  const ChshEstimate est = estimate_chsh(table);
  r.S = est.S;
  r.correlators = est.correlators;
  r.sigma_stat = sigma_stat(table);
  r.signaling = lr_test(table);
  r.accidental_rate = accidental_estimate(records);
  if (config) {
    r.sigma_syst = motor_budget({config->alice.motor_sigma, config->bob.motor_sigma},
                                config->schedule.repetitions, config->source,
                                config->nominal_angles());
  }
  return r;
}

}  // namespace bellsig
