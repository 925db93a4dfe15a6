#pragma once

#include <array>

#include "bellsig/counts.hpp"
#include "bellsig/estimators.hpp"

namespace bellsig {

// Nonsignaling correlations in marginal + joint form:
//   P(+,+|x,y) = joint[x][y]
//   P(+,-|x,y) = alice[x] - joint[x][y]
//   P(-,+|x,y) = bob[y]   - joint[x][y]
//   P(-,-|x,y) = 1 - alice[x] - bob[y] + joint[x][y]
// Nonsignaling holds by construction; feasibility is the nonnegativity of
// all sixteen cells (the Frechet bounds on each joint).
struct NSParams {
  std::array<double, 2> alice{0.5, 0.5};  // P(a=+1|x)
  std::array<double, 2> bob{0.5, 0.5};    // P(b=+1|y)
  std::array<std::array<double, 2>, 2> joint{{{0.25, 0.25}, {0.25, 0.25}}};

  double cell(int x, int y, int a, int b) const;
  double min_cell() const;
  bool feasible(double tol = 1e-12) const { return min_cell() >= -tol; }

  std::array<double, 8> to_vector() const;
  static NSParams from_vector(const std::array<double, 8>& v);
};

struct NsFit {
  NSParams params;
  double log_likelihood = 0.0;  // includes the Poisson rate terms sum(N log N - N)
  int newton_iterations = 0;
};

// Maximum-likelihood nonsignaling fit. Throws NonConvergenceError when the
// solver stalls, and ValidationError on an incomplete table.
NsFit ns_mle(const CountsTable& table);

// Maximum log-likelihood without the nonsignaling constraint (P = n/N),
// on the same scale as NsFit::log_likelihood.
double unconstrained_log_likelihood(const CountsTable& table);

// Log-likelihood of `params` on `table`, same scale as above.
double ns_log_likelihood(const CountsTable& table, const NSParams& params);

struct SignalingReport {
  double xi = 0.0;
  int dof = 4;
  double log_p = 0.0;
  double sigma = 0.0;
  std::array<NaiveSignaling, 4> naive{};

  double log10_p() const;
};

SignalingReport lr_test(const CountsTable& table);

}  // namespace bellsig
