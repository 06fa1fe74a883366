// Independent reference implementations used only to verify the library.
// Deliberately naive: sorting, dense factorizations, exhaustive enumeration,
// and slow iterative schemes, kept apart from the code paths they check.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "fwopt/types.hpp"

namespace oracles {

using fwopt::Vector;

/// Sort-and-scan projection onto the l1 ball (O(n log n)).
inline Vector project_l1_ball_sorted(const Vector& y, double tau) {
  if (y.lpNorm<1>() <= tau) return y;
  std::vector<double> u(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(y(i));
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    css += u[j];
    const double cand = (css - tau) / static_cast<double>(j + 1);
    if (cand < u[j]) theta = cand;
  }
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y(i)) - theta;
    out(i) = a > 0.0 ? (y(i) > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

/// Bisection on the threshold solving sum_i max(|y_i| - theta, 0) = tau.
inline Vector project_l1_ball_bisect(const Vector& y, double tau) {
  if (y.lpNorm<1>() <= tau) return y;
  auto excess = [&](double theta) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s += std::max(std::abs(y(i)) - theta, 0.0);
    return s;
  };
  double lo = 0.0, hi = y.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > tau ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y(i)) - theta;
    out(i) = a > 0.0 ? (y(i) > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

/// Exact TV prox through the dual: min 0.5||y - D^T z||^2 s.t. ||z||_inf <= level,
/// solved by cyclic coordinate descent on the tridiagonal dual to high accuracy.
inline Vector tv1d_prox_dual_cd(const Vector& y, double level, int sweeps = 20000,
                                double tol = 1e-13) {
  const Eigen::Index n = y.size();
  if (n <= 1 || level == 0.0) return y;
  const Eigen::Index m = n - 1;
  Vector z = Vector::Zero(m);
  Vector dy(m);
  for (Eigen::Index i = 0; i < m; ++i) dy(i) = y(i + 1) - y(i);
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      // (D D^T z)_i = 2 z_i - z_{i-1} - z_{i+1}
      const double neighbors = (i > 0 ? z(i - 1) : 0.0) + (i + 1 < m ? z(i + 1) : 0.0);
      const double target = (dy(i) + neighbors) / 2.0;
      const double znew = std::clamp(target, -level, level);
      change = std::max(change, std::abs(znew - z(i)));
      z(i) = znew;
    }
    if (change < tol * scale) break;
  }
  // x = y - D^T z
  Vector x = y;
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i) -= -z(i);
    x(i + 1) -= z(i);
  }
  return x;
}

/// Dense BFGS replay: B0 = (1/gamma) I updated with every pair in order.
inline Eigen::MatrixXd dense_bfgs(const std::vector<Vector>& s, const std::vector<Vector>& t,
                                  double gamma) {
  const Eigen::Index n = s.front().size();
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) / gamma;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vector bs = b * s[i];
    b -= (bs * bs.transpose()) / s[i].dot(bs);
    b += (t[i] * t[i].transpose()) / t[i].dot(s[i]);
  }
  return b;
}

/// Minimizes 0.5 x^T B x + c^T x over a box by enumerating all 3^n
/// lower/free/upper patterns and keeping the best feasible candidate.
inline Vector box_qp_enumerate(const Eigen::MatrixXd& b, const Vector& c, const Vector& lo,
                               const Vector& hi) {
  const int n = static_cast<int>(c.size());
  auto objective = [&](const Vector& x) { return 0.5 * x.dot(b * x) + c.dot(x); };
  Vector best = lo;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<int> pattern(static_cast<std::size_t>(n), 0);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long rem = code;
    std::vector<int> free_idx;
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      pattern[static_cast<std::size_t>(i)] = static_cast<int>(rem % 3);
      rem /= 3;
      if (pattern[static_cast<std::size_t>(i)] == 0) x(i) = lo(i);
      if (pattern[static_cast<std::size_t>(i)] == 1) x(i) = hi(i);
      if (pattern[static_cast<std::size_t>(i)] == 2) free_idx.push_back(i);
    }
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Eigen::MatrixXd bff(nf, nf);
      Vector rhs(nf);
      for (int a = 0; a < nf; ++a) {
        rhs(a) = -c(free_idx[static_cast<std::size_t>(a)]);
        for (int q = 0; q < nf; ++q) {
          bff(a, q) = b(free_idx[static_cast<std::size_t>(a)], free_idx[static_cast<std::size_t>(q)]);
        }
        for (int i = 0; i < n; ++i) {
          if (pattern[static_cast<std::size_t>(i)] != 2) {
            rhs(a) -= b(free_idx[static_cast<std::size_t>(a)], i) * x(i);
          }
        }
      }
      const Vector xf = bff.ldlt().solve(rhs);
      bool feasible = true;
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[static_cast<std::size_t>(a)];
        if (xf(a) < lo(i) - 1e-12 || xf(a) > hi(i) + 1e-12) {
          feasible = false;
          break;
        }
        x(i) = xf(a);
      }
      if (!feasible) continue;
    }
    const double val = objective(x);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  return best;
}

/// Central finite difference of a scalar function along coordinate i.
template <typename F>
double central_fd(F&& f, const Vector& y, Eigen::Index i, double step) {
  Vector yp = y, ym = y;
  yp(i) += step;
  ym(i) -= step;
  return (f(yp) - f(ym)) / (2.0 * step);
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

}  // namespace oracles
