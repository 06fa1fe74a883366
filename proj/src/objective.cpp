#include "fwopt/objective.hpp"

#include <cmath>
#include <sstream>

namespace fwopt {

void CompositeProblem::validate() const {
  if (grid.nz < 8 || grid.nx < 8) throw InvalidInput("problem: grid must be at least 8x8");
  if (!(grid.h > 0.0)) throw InvalidInput("problem: grid spacing must be positive");
  if (transform.size() != grid.size()) {
    throw InvalidInput("problem: transform size does not match grid");
  }
  if (observed.n_freq() != geometry.n_freq()) {
    throw InvalidInput("problem: observed data frequency count does not match geometry");
  }
  if (freq_weights.size() != 0 && freq_weights.size() != geometry.n_freq()) {
    throw InvalidInput("problem: freq_weights length must match frequency count");
  }
  if (physical_bounds && !(physical_bounds->m_lo < physical_bounds->m_hi)) {
    throw InvalidInput("problem: physical bounds require m_lo < m_hi");
  }
}

GridModel2D CompositeProblem::model_from(const Vector& m_field) const {
  return GridModel2D{grid.nz, grid.nx, grid.h, m_field};
}

namespace {

// Transform y to a physical model, rejecting non-positive or out-of-bounds
// squared slowness with the first offending cell (backtracking signal).
GridModel2D model_checked(const CompositeProblem& p, const Vector& y) {
  Vector m_field = p.transform.apply(y);
  const double lo = p.physical_bounds ? p.physical_bounds->m_lo : 0.0;
  const double hi = p.physical_bounds ? p.physical_bounds->m_hi
                                      : std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m_field.size(); ++i) {
    const double v = m_field(i);
    if (!std::isfinite(v) || v <= 0.0 || v < lo || v > hi) {
      std::ostringstream oss;
      oss << "trial model leaves the physical domain at cell " << i << " (m = " << v << ")";
      throw InvalidModel(oss.str(), i);
    }
  }
  return p.model_from(std::move(m_field));
}

EvalRecord eval_impl(const CompositeProblem& p, const Vector& y, bool need_gradient) {
  p.validate();
  if (y.size() != p.transform.size()) throw InvalidInput("eval: y length mismatch");
  const GridModel2D model = model_checked(p, y);
  const MisfitEval mis = misfit_eval(model, p.geometry, p.observed, p.penalty, p.boundary,
                                     need_gradient, p.freq_weights, p.threads);
  EvalRecord rec;
  rec.smooth_value = mis.value;
  rec.ls_residual = mis.ls_residual;
  rec.pde_solve_count = mis.pde_solves;
  if (need_gradient) rec.smooth_gradient = p.transform.adjoint(mis.gradient);
  rec.reg_value = p.regularizer.value(y);
  rec.total = rec.smooth_value + rec.reg_value;
  return rec;
}

}  // namespace

EvalRecord eval_smooth(const CompositeProblem& p, const Vector& y) {
  return eval_impl(p, y, true);
}

EvalRecord eval_smooth_value(const CompositeProblem& p, const Vector& y) {
  return eval_impl(p, y, false);
}

double eval_total(const CompositeProblem& p, const Vector& y, long* pde_solves) {
  const EvalRecord rec = eval_impl(p, y, false);
  if (pde_solves) *pde_solves += rec.pde_solve_count;
  return rec.total;
}

}  // namespace fwopt
