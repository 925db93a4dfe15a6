#include "bellsig/estimators.hpp"

#include <cmath>

#include "bellsig/model.hpp"

namespace bellsig {

namespace {

double correlator_hat(const CountsTable& t, int x, int y) {
  const double n = static_cast<double>(t.total(x, y));
  double e = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) e += outcome_sign(a) * outcome_sign(b) * static_cast<double>(t.at(x, y, a, b));
  return e / n;
}

// Empirical P(+1) for Alice (party 0) or Bob (party 1) under setting (x, y).
double plus_fraction(const CountsTable& t, int party, int x, int y) {
  const double plus = party == 0 ? static_cast<double>(t.at(x, y, 0, 0) + t.at(x, y, 0, 1))
                                 : static_cast<double>(t.at(x, y, 0, 0) + t.at(x, y, 1, 0));
  return plus / static_cast<double>(t.total(x, y));
}

}  // namespace

ChshEstimate estimate_chsh(const CountsTable& table) {
  table.require_complete();
  ChshEstimate est;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double e = correlator_hat(table, x, y);
      est.correlators[2 * x + y] = e;
      est.S += chsh_sign(x, y) * e;
    }
  return est;
}

double sigma_stat(const CountsTable& table) {
  table.require_complete();
  double var = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double n = static_cast<double>(table.total(x, y));
      const double e = correlator_hat(table, x, y);
      double v = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double d = outcome_sign(a) * outcome_sign(b) - e;
          v += static_cast<double>(table.at(x, y, a, b)) * d * d;
        }
      var += v / (n * n);
    }
  return std::sqrt(var);
}

std::array<NaiveSignaling, 4> naive_signaling(const CountsTable& table) {
  table.require_complete();
  std::array<NaiveSignaling, 4> out;
  for (int party = 0; party < 2; ++party) {
    for (int own = 0; own < 2; ++own) {
      // Alice's setting x fixed while Bob's y varies, and vice versa.
      auto setting = [&](int partner) { return party == 0 ? std::pair{own, partner} : std::pair{partner, own}; };
      const auto [x0, y0] = setting(0);
      const auto [x1, y1] = setting(1);
      const double p0 = plus_fraction(table, party, x0, y0);
      const double p1 = plus_fraction(table, party, x1, y1);
      const double n0 = static_cast<double>(table.total(x0, y0));
      const double n1 = static_cast<double>(table.total(x1, y1));
      NaiveSignaling& e = out[2 * party + own];
      e.label = std::string(party == 0 ? "A" : "B") + std::to_string(own);
      e.s_hat = p0 - p1;
      e.sigma_hat = std::sqrt(p0 * (1 - p0) / n0 + p1 * (1 - p1) / n1);
      e.z = e.sigma_hat > 0.0 ? e.s_hat / e.sigma_hat : 0.0;
    }
  }
  return out;
}

}  // namespace bellsig
