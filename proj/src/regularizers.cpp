#include "fwopt/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace fwopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-12;

void require_finite(const Vector& y, const char* who) {
  if (!y.allFinite()) {
    throw InvalidInput(std::string(who) + ": non-finite input entries");
  }
}

}  // namespace

Vector soft_threshold(const Vector& y, double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw InvalidInput("soft_threshold: level must be nonnegative and finite");
  }
  return y.array().sign() * (y.array().abs() - level).max(0.0);
}

Vector project_l1_ball(const Vector& y, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidInput("project_l1_ball: tau must be positive and finite");
  }
  require_finite(y, "project_l1_ball");
  if (y.lpNorm<1>() <= tau) return y;

  // Randomized-pivot threshold search: find theta solving
  // sum_i max(|y_i| - theta, 0) = tau without sorting. Each round either
  // commits the >=pivot group to the support or discards the pivot and the
  // smaller half, so the expected work is linear. Fixed pivot seed keeps the
  // result deterministic across runs.
  std::vector<double> a(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(y(i));

  std::mt19937_64 rng(0x2545F4914F6CDD1DULL);
  std::size_t lo = 0, hi = a.size();
  double above_sum = 0.0;
  long above_count = 0;
  while (lo < hi) {
    const double pivot = a[lo + rng() % (hi - lo)];
    auto mid = std::partition(a.begin() + static_cast<std::ptrdiff_t>(lo),
                              a.begin() + static_cast<std::ptrdiff_t>(hi),
                              [pivot](double v) { return v >= pivot; });
    const std::size_t g = static_cast<std::size_t>(mid - (a.begin() + static_cast<std::ptrdiff_t>(lo)));
    double gsum = 0.0;
    for (std::size_t i = lo; i < lo + g; ++i) gsum += a[i];
    if (above_sum + gsum - static_cast<double>(above_count + static_cast<long>(g)) * pivot < tau) {
      above_sum += gsum;
      above_count += static_cast<long>(g);
      lo += g;
    } else {
      std::size_t p = lo;
      while (a[p] != pivot) ++p;
      std::swap(a[p], a[lo + g - 1]);
      hi = lo + g - 1;
    }
  }
  const double theta = (above_sum - tau) / static_cast<double>(above_count);
  return soft_threshold(y, theta);
}

Vector tv1d_prox(const Vector& y, double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw InvalidInput("tv1d_prox: level must be nonnegative and finite");
  }
  require_finite(y, "tv1d_prox");
  const Eigen::Index n = y.size();
  if (n <= 1 || level == 0.0) return y;

  // Condat's direct algorithm: runs the taut string through the lambda-tube,
  // emitting each maximal segment as soon as it is forced.
  Vector out(n);
  const double* in = y.data();
  double* x = out.data();
  Eigen::Index k = 0, k0 = 0, kminus = 0, kplus = 0;
  double umin = level, umax = -level;
  double vmin = in[0] - level, vmax = in[0] + level;
  const double twolevel = 2.0 * level;
  const double neglevel = -level;
  for (;;) {
    while (k == n - 1) {
      if (umin < 0.0) {
        do { x[k0++] = vmin; } while (k0 <= kminus);
        kminus = k = k0;
        vmin = in[kminus];
        umin = level;
        umax = vmin + umin - vmax;
      } else if (umax > 0.0) {
        do { x[k0++] = vmax; } while (k0 <= kplus);
        kplus = k = k0;
        vmax = in[kplus];
        umax = neglevel;
        umin = vmax + umax - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do { x[k0++] = vmin; } while (k0 <= k);
        return out;
      }
    }
    const double uminp = umin + in[k + 1] - vmin;
    const double umaxp = umax + in[k + 1] - vmax;
    if (uminp < neglevel) {
      do { x[k0++] = vmin; } while (k0 <= kminus);
      kplus = kminus = k = k0;
      vmin = in[k0];
      vmax = vmin + twolevel;
      umin = level;
      umax = neglevel;
    } else if (umaxp > level) {
      do { x[k0++] = vmax; } while (k0 <= kplus);
      kplus = kminus = k = k0;
      vmax = in[k0];
      vmin = vmax - twolevel;
      umin = level;
      umax = neglevel;
    } else {
      umin = uminp;
      umax = umaxp;
      ++k;
      if (umin >= level) {
        vmin += (umin - level) / static_cast<double>(k - k0 + 1);
        umin = level;
        kminus = k;
      }
      if (umax <= neglevel) {
        vmax += (umax + level) / static_cast<double>(k - k0 + 1);
        umax = neglevel;
        kplus = k;
      }
    }
  }
}

namespace {

Vector prox_tv2d(const Vector& y, double level, int nz, int nx) {
  if (level == 0.0) return y;
  using Mat = Eigen::MatrixXd;
  Mat x = Eigen::Map<const Mat>(y.data(), nz, nx);
  Mat p = Mat::Zero(nz, nx);
  Mat q = Mat::Zero(nz, nx);
  const double scale = std::max(1.0, y.norm());
  // Dykstra-style alternation between the column-direction and row-direction
  // 1-D TV proxes; converges to the prox of their sum.
  for (int it = 0; it < 50; ++it) {
    Mat u = x + p;
    for (int c = 0; c < nx; ++c) {
      Vector col = u.col(c);
      u.col(c) = tv1d_prox(col, level);
    }
    p = x + p - u;
    Mat v = u + q;
    for (int r = 0; r < nz; ++r) {
      Vector row = v.row(r).transpose();
      v.row(r) = tv1d_prox(row, level).transpose();
    }
    q = u + q - v;
    const double change = (v - x).norm();
    x = v;
    if (change < 1e-8 * scale) break;
  }
  return Eigen::Map<const Vector>(x.data(), x.size());
}

}  // namespace

Regularizer Regularizer::zero() { return Regularizer(RegularizerKind::Zero); }

Regularizer Regularizer::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw InvalidInput("box: lo/hi length mismatch");
  if (((hi - lo).array() < 0.0).any()) throw InvalidInput("box: requires lo <= hi elementwise");
  Regularizer r(RegularizerKind::Box);
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

Regularizer Regularizer::l1_penalty(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("l1_penalty: lambda must be nonnegative and finite");
  }
  Regularizer r(RegularizerKind::L1Penalty);
  r.lambda_ = lambda;
  return r;
}

Regularizer Regularizer::l1_ball(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidInput("l1_ball: tau must be positive and finite");
  }
  Regularizer r(RegularizerKind::L1Ball);
  r.tau_ = tau;
  return r;
}

Regularizer Regularizer::tv1d(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("tv1d: lambda must be nonnegative and finite");
  }
  Regularizer r(RegularizerKind::TV1D);
  r.lambda_ = lambda;
  return r;
}

Regularizer Regularizer::tv2d_anisotropic(double lambda, int nz, int nx) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("tv2d: lambda must be nonnegative and finite");
  }
  if (nz < 1 || nx < 1) throw InvalidInput("tv2d: grid shape must be positive");
  Regularizer r(RegularizerKind::TV2DAnisotropic);
  r.lambda_ = lambda;
  r.nz_ = nz;
  r.nx_ = nx;
  return r;
}

void Regularizer::check_shape(const Vector& y) const {
  require_finite(y, "regularizer");
  if (kind_ == RegularizerKind::Box && y.size() != lo_.size()) {
    throw InvalidInput("box: vector length does not match bounds");
  }
  if (kind_ == RegularizerKind::TV2DAnisotropic &&
      y.size() != static_cast<Eigen::Index>(nz_) * nx_) {
    throw InvalidInput("tv2d: vector length does not match declared grid shape");
  }
}

double Regularizer::value(const Vector& y) const {
  check_shape(y);
  switch (kind_) {
    case RegularizerKind::Zero:
      return 0.0;
    case RegularizerKind::Box: {
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double tol = kFeasTol * std::max(std::abs(lo_(i)), std::abs(hi_(i)));
        if (y(i) < lo_(i) - tol || y(i) > hi_(i) + tol) return kInf;
      }
      return 0.0;
    }
    case RegularizerKind::L1Penalty:
      return lambda_ * y.lpNorm<1>();
    case RegularizerKind::L1Ball:
      return y.lpNorm<1>() <= tau_ * (1.0 + kFeasTol) ? 0.0 : kInf;
    case RegularizerKind::TV1D: {
      double tv = 0.0;
      for (Eigen::Index i = 0; i + 1 < y.size(); ++i) tv += std::abs(y(i + 1) - y(i));
      return lambda_ * tv;
    }
    case RegularizerKind::TV2DAnisotropic: {
      Eigen::Map<const Eigen::MatrixXd> g(y.data(), nz_, nx_);
      double tv = 0.0;
      for (int x = 0; x < nx_; ++x)
        for (int z = 0; z + 1 < nz_; ++z) tv += std::abs(g(z + 1, x) - g(z, x));
      for (int x = 0; x + 1 < nx_; ++x)
        for (int z = 0; z < nz_; ++z) tv += std::abs(g(z, x + 1) - g(z, x));
      return lambda_ * tv;
    }
  }
  throw InvalidInput("regularizer: unknown kind");
}

Vector Regularizer::prox(const Vector& y, double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidInput("prox: step t must be positive and finite");
  }
  check_shape(y);
  switch (kind_) {
    case RegularizerKind::Zero:
      return y;
    case RegularizerKind::Box:
      return y.cwiseMax(lo_).cwiseMin(hi_);
    case RegularizerKind::L1Penalty:
      return soft_threshold(y, t * lambda_);
    case RegularizerKind::L1Ball:
      return project_l1_ball(y, tau_);
    case RegularizerKind::TV1D:
      return tv1d_prox(y, t * lambda_);
    case RegularizerKind::TV2DAnisotropic:
      return prox_tv2d(y, t * lambda_, nz_, nx_);
  }
  throw InvalidInput("regularizer: unknown kind");
}

std::string Regularizer::name() const {
  switch (kind_) {
    case RegularizerKind::Zero: return "zero";
    case RegularizerKind::Box: return "box";
    case RegularizerKind::L1Penalty: return "l1_penalty";
    case RegularizerKind::L1Ball: return "l1_ball";
    case RegularizerKind::TV1D: return "tv1d";
    case RegularizerKind::TV2DAnisotropic: return "tv2d";
  }
  return "?";
}

}  // namespace fwopt
