#pragma once

#include "fwopt/types.hpp"

namespace fwopt {

enum class RegularizerKind { Zero, Box, L1Penalty, L1Ball, TV1D, TV2DAnisotropic };

/// Soft thresholding: sign(y_i) * max(|y_i| - level, 0).
Vector soft_threshold(const Vector& y, double level);

/// Euclidean projection onto {g : ||g||_1 <= tau}. Returns y unchanged when
/// already feasible. Uses a randomized-pivot threshold search (expected linear
/// time, no full sort).
Vector project_l1_ball(const Vector& y, double tau);

/// Exact prox of level * sum_i |g_{i+1} - g_i| (1-D total variation), via
/// Condat's direct non-iterative algorithm.
Vector tv1d_prox(const Vector& y, double level);

/// Regularizer R defined by a value (possibly +infinity for indicator kinds)
/// and a scaled proximity operator prox(y, t) = argmin_g 0.5*||g - y||^2 + t*R(g).
class Regularizer {
 public:
  static Regularizer zero();
  static Regularizer box(Vector lo, Vector hi);
  static Regularizer l1_penalty(double lambda);
  static Regularizer l1_ball(double tau);
  static Regularizer tv1d(double lambda);
  static Regularizer tv2d_anisotropic(double lambda, int nz, int nx);

  RegularizerKind kind() const { return kind_; }
  bool is_indicator() const {
    return kind_ == RegularizerKind::Box || kind_ == RegularizerKind::L1Ball;
  }
  double lambda() const { return lambda_; }
  double tau() const { return tau_; }

  /// Indicator kinds use a 1e-12 relative feasibility tolerance so that a
  /// freshly projected point never evaluates to +infinity from rounding.
  double value(const Vector& y) const;

  /// The unique minimizer of 0.5*||g - y||^2 + t*R(g). For Box and L1Ball the
  /// result does not depend on t. TV2DAnisotropic is computed inexactly by
  /// Dykstra-style alternation of row/column 1-D TV proxes (50 iterations or
  /// relative change < 1e-8); everything else is exact.
  Vector prox(const Vector& y, double t) const;

  std::string name() const;

 private:
  Regularizer(RegularizerKind kind) : kind_(kind) {}

  void check_shape(const Vector& y) const;

  RegularizerKind kind_;
  double lambda_ = 0.0;
  double tau_ = 0.0;
  Vector lo_, hi_;
  int nz_ = 0, nx_ = 0;
};

}  // namespace fwopt
