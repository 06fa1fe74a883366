#pragma once

#include <optional>

#include "fwopt/helmholtz.hpp"
#include "fwopt/penalties.hpp"
#include "fwopt/regularizers.hpp"
#include "fwopt/transforms.hpp"
#include "fwopt/types.hpp"

namespace fwopt {

/// Physical bounds on the squared slowness applied after the transform;
/// violations signal the line search to backtrack.
struct PhysicalBounds {
  double m_lo = 0.0;
  double m_hi = std::numeric_limits<double>::infinity();
};

struct GridShape {
  int nz = 0;
  int nx = 0;
  double h = 1.0;
  Eigen::Index size() const { return static_cast<Eigen::Index>(nz) * nx; }
};

/// The composite inversion problem: smooth data misfit through the forward
/// map at m = C y, plus a prox-friendly regularizer on y.
struct CompositeProblem {
  GridShape grid;
  AcquisitionGeometry geometry;
  FrequencyData observed;
  Penalty penalty = Penalty::least_squares();
  Regularizer regularizer = Regularizer::zero();
  Transform transform = Transform::identity(1);
  BoundaryConfig boundary;
  std::optional<PhysicalBounds> physical_bounds;
  Vector freq_weights;  // empty = all ones
  int threads = 1;

  void validate() const;
  GridModel2D model_from(const Vector& m_field) const;
};

struct EvalRecord {
  double smooth_value = 0.0;
  double reg_value = 0.0;  // may be +infinity
  double total = 0.0;      // smooth + reg
  Vector smooth_gradient;  // in transform coordinates (empty for value-only)
  double ls_residual = 0.0;
  long pde_solve_count = 0;
};

/// Smooth part: value, gradient in transform coordinates (chain rule through
/// the transform adjoint), ls_residual, and exact PDE-solve accounting
/// (2 * n_freq * n_src). Throws InvalidModel with the offending cell when
/// m = C y leaves the physical domain.
EvalRecord eval_smooth(const CompositeProblem& p, const Vector& y);

/// Value-only variant (forward solves only, n_freq * n_src).
EvalRecord eval_smooth_value(const CompositeProblem& p, const Vector& y);

/// smooth value + regularizer value; +infinity when y is infeasible for an
/// indicator regularizer.
double eval_total(const CompositeProblem& p, const Vector& y, long* pde_solves = nullptr);

}  // namespace fwopt
