#include "bellsig/significance.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bellsig/error.hpp"

namespace bellsig {

double chi2_log_survival(double xi, int dof) {
  if (std::isnan(xi) || xi < 0.0) throw InputError("chi-square statistic must be >= 0");
  if (dof <= 0 || dof % 2 != 0)
    throw InputError("chi2_log_survival supports positive even dof only, got " + std::to_string(dof));
  if (xi == 0.0) return 0.0;
  if (std::isinf(xi)) return -std::numeric_limits<double>::infinity();
  const double half = 0.5 * xi;
  if (dof == 4) return -half + std::log1p(half);

  // p = exp(-x/2) sum_{j<m} (x/2)^j / j!, summed as a log-sum-exp.
  const int m = dof / 2;
  const double log_half = std::log(half);
  double peak = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) peak = std::max(peak, j * log_half - std::lgamma(j + 1.0));
  double sum = 0.0;
  for (int j = 0; j < m; ++j) sum += std::exp(j * log_half - std::lgamma(j + 1.0) - peak);
  return -half + peak + std::log(sum);
}

double log_erfc(double z) {
  if (std::isnan(z)) throw InputError("log_erfc of NaN");
  if (z < 0.5) return std::log1p(-std::erf(z));
  if (z < 25.0) return std::log(std::erfc(z));
  // erfc(z) = exp(-z^2) / (z sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2z^2)^k
  const double inv = 1.0 / (2.0 * z * z);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -(2.0 * k - 1.0) * inv;
    series += term;
    if (std::abs(term) < 1e-18) break;
  }
  return -z * z - std::log(z * std::sqrt(std::numbers::pi)) + std::log(series);
}

double log_normal_two_sided_tail(double s) {
  if (std::isnan(s) || s < 0.0) throw InputError("significance must be >= 0");
  return log_erfc(s / std::numbers::sqrt2);
}

double sigma_from_log_p(double log_p) {
  if (std::isnan(log_p) || log_p > 0.0) throw InputError("log p-value must be <= 0");
  if (log_p == 0.0) return 0.0;
  if (std::isinf(log_p)) return std::numeric_limits<double>::infinity();

  double s;
  if (log_p > -700.0) {
    s = std::numbers::sqrt2 * boost::math::erfc_inv(std::exp(log_p));
  } else {
    // -2 log p ~ s^2 + log(pi s^2 / 2)
    double s2 = -2.0 * log_p;
    for (int i = 0; i < 8; ++i) s2 = -2.0 * log_p - std::log(std::numbers::pi * s2 / 2.0);
    s = std::sqrt(s2);
  }

  // Newton on g(s) = log tail(s) - log p, with g'(s) = -sqrt(2/pi) exp(-s^2/2 - log tail(s)).
  const double k = std::sqrt(2.0 / std::numbers::pi);
  for (int i = 0; i < 60; ++i) {
    const double lt = log_normal_two_sided_tail(s);
    const double g = lt - log_p;
    const double dg = -k * std::exp(-0.5 * s * s - lt);
    double next = s - g / dg;
    if (next < 0.0) next = 0.5 * s;
    const double delta = std::abs(next - s);
    s = next;
    if (delta <= 1e-15 * std::max(1.0, s)) break;
  }
  return s;
}

}  // namespace bellsig
