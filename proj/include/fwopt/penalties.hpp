#pragma once

#include "fwopt/types.hpp"

namespace fwopt {

enum class PenaltyKind { LeastSquares, Huber, StudentT };

/// Differentiable misfit penalty on a complex residual matrix. Robust kinds
/// act on entry moduli |r_i|, so the value is invariant to the phase of each
/// data entry. Gradients follow the real inner product Re<A,B> = Re tr(A^H B):
/// d value = Re<gradient, dr> to first order.
class Penalty {
 public:
  static Penalty least_squares() { return Penalty(PenaltyKind::LeastSquares, 0.0); }
  static Penalty huber(double kappa);
  static Penalty student_t(double nu);

  PenaltyKind kind() const { return kind_; }
  /// Huber threshold; only meaningful for the Huber kind.
  double kappa() const { return param_; }
  /// Student's t scale; only meaningful for the StudentT kind.
  double nu() const { return param_; }

  /// LeastSquares: sum |r_i|^2.
  /// Huber:        sum eta(|r_i|), eta(t) = t^2/2 for t <= kappa, else kappa*t - kappa^2/2.
  /// StudentT:     sum log(nu + |r_i|^2).
  double value(const ComplexMatrix& r) const;

  /// LeastSquares: 2r. Huber: r inside the threshold, kappa*r/|r| outside.
  /// StudentT: 2r/(nu + |r|^2), entrywise.
  ComplexMatrix gradient(const ComplexMatrix& r) const;

  std::string name() const;

 private:
  Penalty(PenaltyKind kind, double param) : kind_(kind), param_(param) {}

  PenaltyKind kind_;
  double param_;
};

}  // namespace fwopt
