#pragma once

#include <deque>

#include "fwopt/types.hpp"

namespace fwopt {

/// Bounded store of L-BFGS curvature pairs (s_i, t_i) defining the direct
/// (non-inverse) Hessian approximation B with B0 = (1/gamma) I, where
/// gamma = <s,t>/<t,t> of the newest accepted pair. Pairs failing the
/// relative curvature condition <s,t> > tol*||s||*||t|| are skipped, which
/// keeps B symmetric positive definite.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(Eigen::Index dim, int capacity = 10, double curvature_tol = 1e-10);

  /// Appends a pair (evicting the oldest at capacity). Returns false when the
  /// pair is rejected by the curvature condition; the memory is unchanged.
  bool update(const Vector& s, const Vector& t);

  /// B * d via the unrolled BFGS update formula.
  Vector hessian_apply(const Vector& d) const;

  /// Q(y) = phi_k + <g_k, y - y_k> + 0.5 <y - y_k, B (y - y_k)>.
  double quadratic_model(double phi_k, const Vector& y_k, const Vector& g_k,
                         const Vector& y) const;

  /// Initial-scaling gamma of the newest accepted pair; 1 when empty.
  double gamma() const { return gamma_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  long skipped() const { return skipped_; }
  Eigen::Index dim() const { return dim_; }

 private:
  struct Pair {
    Vector s, t;
    Vector bs;       // B_i s_i with B_i built from the older pairs
    double s_bs = 0; // <s_i, B_i s_i>
    double s_t = 0;  // <s_i, t_i>
  };

  void rebuild_cache();

  Eigen::Index dim_;
  int capacity_;
  double curvature_tol_;
  double gamma_ = 1.0;
  long skipped_ = 0;
  std::deque<Pair> pairs_;
};

}  // namespace fwopt
