#include "bellsig/ns_mle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "bellsig/error.hpp"
#include "bellsig/significance.hpp"

namespace bellsig {

namespace {

// Parameter vector layout: alice[0], alice[1], bob[0], bob[1], joint 00, 01, 10, 11.
// Each of the 16 cells is affine in it: p_k = G_k . theta + h_k.
struct CellMap {
  Eigen::Matrix<double, 16, 8> G = Eigen::Matrix<double, 16, 8>::Zero();
  Eigen::Matrix<double, 16, 1> h = Eigen::Matrix<double, 16, 1>::Zero();

  CellMap() {
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const int ax = x, by = 2 + y, j = 4 + 2 * x + y;
        const auto k = [&](int a, int b) { return static_cast<Eigen::Index>(CountsTable::flat(x, y, a, b)); };
        G(k(0, 0), j) = 1.0;
        G(k(0, 1), ax) = 1.0;
        G(k(0, 1), j) = -1.0;
        G(k(1, 0), by) = 1.0;
        G(k(1, 0), j) = -1.0;
        G(k(1, 1), ax) = -1.0;
        G(k(1, 1), by) = -1.0;
        G(k(1, 1), j) = 1.0;
        h(k(1, 1)) = 1.0;
      }
  }
};

const CellMap& cell_map() {
  static const CellMap m;
  return m;
}

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec16 = Eigen::Matrix<double, 16, 1>;

Vec8 to_eigen(const NSParams& p) {
  const auto v = p.to_vector();
  return Eigen::Map<const Vec8>(v.data());
}

NSParams from_eigen(const Vec8& v) {
  std::array<double, 8> a{};
  Eigen::Map<Vec8>(a.data()) = v;
  return NSParams::from_vector(a);
}

double poisson_rate_terms(const CountsTable& t) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double n = static_cast<double>(t.total(x, y));
      if (n > 0) s += n * std::log(n) - n;
    }
  return s;
}

// sum_k w_k log p_k, -inf outside the open feasible region.
double weighted_log(const Vec16& w, const Vec16& p) {
  double f = 0.0;
  for (int k = 0; k < 16; ++k) {
    if (p(k) <= 0.0) return -std::numeric_limits<double>::infinity();
    f += w(k) * std::log(p(k));
  }
  return f;
}

// Least-squares projection of the empirical frequencies onto the nonsignaling
// subspace, mixed with the uniform point so every cell starts strictly positive.
Vec8 initial_point(const CountsTable& t) {
  const CellMap& m = cell_map();
  Vec16 freq;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          freq(static_cast<Eigen::Index>(CountsTable::flat(x, y, a, b))) =
              static_cast<double>(t.at(x, y, a, b)) / static_cast<double>(t.total(x, y));
  const Vec8 ls = (m.G.transpose() * m.G).ldlt().solve(m.G.transpose() * (freq - m.h));
  const Vec8 uniform = to_eigen(NSParams{});

  // Uniform cells are 1/4; keep every mixed cell >= 1/64.
  const Vec16 p_ls = m.G * ls + m.h;
  double w = 0.25;
  constexpr double kMargin = 1.0 / 64.0;
  for (int k = 0; k < 16; ++k)
    if (p_ls(k) < kMargin) w = std::max(w, (kMargin - p_ls(k)) / (0.25 - p_ls(k)));
  return (1.0 - w) * ls + w * uniform;
}

}  // namespace

double NSParams::cell(int x, int y, int a, int b) const {
  const double j = joint[x][y];
  if (a == 0 && b == 0) return j;
  if (a == 0) return alice[x] - j;
  if (b == 0) return bob[y] - j;
  return 1.0 - alice[x] - bob[y] + j;
}

double NSParams::min_cell() const {
  double m = std::numeric_limits<double>::infinity();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) m = std::min(m, cell(x, y, a, b));
  return m;
}

std::array<double, 8> NSParams::to_vector() const {
  return {alice[0], alice[1], bob[0], bob[1], joint[0][0], joint[0][1], joint[1][0], joint[1][1]};
}

NSParams NSParams::from_vector(const std::array<double, 8>& v) {
  NSParams p;
  p.alice = {v[0], v[1]};
  p.bob = {v[2], v[3]};
  p.joint = {{{v[4], v[5]}, {v[6], v[7]}}};
  return p;
}

double SignalingReport::log10_p() const { return log_p / std::numbers::ln10; }

double ns_log_likelihood(const CountsTable& table, const NSParams& params) {
  double f = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const auto n = table.at(x, y, a, b);
          if (n == 0) continue;
          const double p = params.cell(x, y, a, b);
          if (p <= 0.0) return -std::numeric_limits<double>::infinity();
          f += static_cast<double>(n) * std::log(p);
        }
  return f + poisson_rate_terms(table);
}

double unconstrained_log_likelihood(const CountsTable& table) {
  double f = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double total = static_cast<double>(table.total(x, y));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double n = static_cast<double>(table.at(x, y, a, b));
          if (n > 0) f += n * std::log(n / total);
        }
    }
  return f + poisson_rate_terms(table);
}

NsFit ns_mle(const CountsTable& table) {
  table.require_complete();
  const CellMap& m = cell_map();
  Vec16 n;
  for (int k = 0; k < 16; ++k) n(k) = static_cast<double>(table.raw()[static_cast<std::size_t>(k)]);
  const double total = n.sum();

  // Log-barrier continuation: maximize sum (n_k + mu) log p_k for a decreasing
  // mu. Damped Newton with a fraction-to-boundary step keeps every iterate
  // strictly feasible, and the final mu bounds the gap to the true optimum by
  // 16 mu even when the optimum lies on the boundary (zero-count cells).
  constexpr double kMuFinal = 1e-13;
  constexpr int kMaxNewtonPerStage = 200;
  Vec8 theta = initial_point(table);
  int iterations = 0;
  double decrement = 0.0;
  Vec8 grad_data = Vec8::Zero();

  for (double mu = 1e-3 * std::max(1.0, total);; mu *= 0.1) {
    const bool last = mu <= kMuFinal;
    if (last) mu = kMuFinal;
    const Vec16 w = (n.array() + mu).matrix();
    int it = 0;
    for (; it < kMaxNewtonPerStage; ++it) {
      const Vec16 p = m.G * theta + m.h;
      const Vec16 wp = (w.array() / p.array()).matrix();
      const Vec8 grad = m.G.transpose() * wp;
      const Vec16 curv = (wp.array() / p.array()).matrix();
      const Eigen::Matrix<double, 8, 8> neg_hess = m.G.transpose() * curv.asDiagonal() * m.G;
      const Vec8 step = neg_hess.ldlt().solve(grad);
      decrement = grad.dot(step);
      grad_data = m.G.transpose() * (n.array() / p.array()).matrix();
      if (!std::isfinite(decrement)) break;
      const double target = last ? 1e-14 : 1e-9 * std::max(1.0, total);
      if (0.5 * decrement <= target) break;

      // Largest step keeping all cells positive, backed off from the boundary.
      const Vec16 dp = m.G * step;
      double alpha = 1.0;
      for (int k = 0; k < 16; ++k)
        if (dp(k) < 0.0) alpha = std::min(alpha, -0.99 * p(k) / dp(k));

      const double f0 = weighted_log(w, p);
      const double slack = 1e-14 * (std::abs(f0) + 1.0);
      while (alpha > 1e-20) {
        const Vec16 trial = m.G * (theta + alpha * step) + m.h;
        const double f1 = weighted_log(w, trial);
        if (f1 >= f0 + 1e-4 * alpha * decrement - slack) break;
        alpha *= 0.5;
      }
      if (alpha <= 1e-20) break;
      theta += alpha * step;
      ++iterations;
    }
    if (last) {
      if (!std::isfinite(decrement) || (it == kMaxNewtonPerStage && 0.5 * decrement > 1e-6)) {
        const auto best = from_eigen(theta).to_vector();
        throw NonConvergenceError("nonsignaling maximum-likelihood fit did not converge",
                                  std::vector<double>(best.begin(), best.end()), grad_data.norm());
      }
      break;
    }
  }

  NsFit fit;
  fit.params = from_eigen(theta);
  fit.log_likelihood = ns_log_likelihood(table, fit.params);
  fit.newton_iterations = iterations;
  return fit;
}

SignalingReport lr_test(const CountsTable& table) {
  const NsFit fit = ns_mle(table);
  // G-statistic form of -2 (log L - log L0), 0 log 0 = 0.
  double xi = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double total = static_cast<double>(table.total(x, y));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double n = static_cast<double>(table.at(x, y, a, b));
          if (n > 0) xi += n * std::log(n / (total * fit.params.cell(x, y, a, b)));
        }
    }
  SignalingReport r;
  r.xi = std::max(0.0, 2.0 * xi);
  r.dof = 4;
  r.log_p = chi2_log_survival(r.xi, r.dof);
  r.sigma = sigma_from_log_p(r.log_p);
  r.naive = naive_signaling(table);
  return r;
}

}  // namespace bellsig
