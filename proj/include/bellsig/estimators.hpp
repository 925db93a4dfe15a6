#pragma once

#include <array>
#include <string>

#include "bellsig/counts.hpp"

namespace bellsig {

struct ChshEstimate {
  std::array<double, 4> correlators{};  // E(0,0), E(0,1), E(1,0), E(1,1)
  double S = 0.0;
};

// All three throw ValidationError when a setting pair has no events.
ChshEstimate estimate_chsh(const CountsTable& table);

// Poisson error propagation, counts treated as independent.
double sigma_stat(const CountsTable& table);

// Difference of one party's +1 marginal across the partner's settings.
struct NaiveSignaling {
  std::string label;  // A0, A1, B0, B1
  double s_hat = 0.0;
  double sigma_hat = 0.0;
  double z = 0.0;
};

std::array<NaiveSignaling, 4> naive_signaling(const CountsTable& table);

}  // namespace bellsig
