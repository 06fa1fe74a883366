#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "fwopt/penalties.hpp"
#include "fwopt/types.hpp"

namespace fwopt {

/// Complex-shifted absorbing sponge: a band of `width` cells along every edge
/// where the squared slowness picks up a factor (1 - i*gamma), with gamma
/// ramping quadratically from 0 at the inner edge of the band to gamma_max at
/// the outermost cells. The outer boundary itself is homogeneous Dirichlet.
struct BoundaryConfig {
  int width = 10;
  double gamma_max = 1.0;
};

/// Damping profile gamma per grid cell for the given shape and boundary.
Vector sponge_profile(int nz, int nx, const BoundaryConfig& bc);

/// Discrete Helmholtz operator H = omega^2 diag(m.*(1 - i*gamma)) + L with L
/// the 5-point Laplacian (spacing h, Dirichlet outside). omega = 0 gives the
/// pure Laplacian; omega < 0 is rejected.
Eigen::SparseMatrix<Complex> assemble(const GridModel2D& m, double omega,
                                      const BoundaryConfig& bc);

/// Sparse LU factorization of one (m, omega, boundary) triple, reusable
/// across sources and shared by the forward and adjoint solves.
class HelmholtzOperator {
 public:
  HelmholtzOperator(const GridModel2D& m, double omega, const BoundaryConfig& bc);

  double omega() const { return omega_; }
  const Eigen::SparseMatrix<Complex>& matrix() const { return H_; }
  const Vector& gamma() const { return gamma_; }

  /// Solves H u = q and verifies ||Hu - q|| <= 1e-10 ||q||.
  ComplexVector solve(const ComplexVector& q) const;
  /// Solves H^H v = b with the same factorization.
  ComplexVector solve_adjoint(const ComplexVector& b) const;

  /// Column-wise variants; each column counts as one PDE solve.
  ComplexMatrix solve(const ComplexMatrix& q) const;
  ComplexMatrix solve_adjoint(const ComplexMatrix& b) const;

  /// Process-wide count of right-hand-side solves, for accounting tests.
  static long total_solve_count();

 private:
  void check_residual(const ComplexMatrix& u, const ComplexMatrix& q) const;

  double omega_;
  Vector gamma_;
  Eigen::SparseMatrix<Complex> H_;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu_;
};

/// Validates geometry against the grid: indices inside the non-sponge
/// interior, frequencies positive, at least one source and receiver. Warns on
/// stderr when the coarsest wavelength drops under 8 grid points.
void validate_geometry(const GridModel2D& m, const AcquisitionGeometry& geom,
                       const BoundaryConfig& bc);

/// Predicted data D[w] = S H(m, w)^{-1} Q for every frequency; S samples the
/// wavefield at the receiver nodes, Q holds unit point sources scaled by
/// 1/h^2 (times the per-source weight).
FrequencyData predict_data(const GridModel2D& m, const AcquisitionGeometry& geom,
                           const BoundaryConfig& bc);

struct MisfitEval {
  double value = 0.0;        // sum over frequencies of the penalty value
  double ls_residual = 0.0;  // always the plain Frobenius misfit, any penalty
  Vector gradient;           // d value / d m (empty when gradient not requested)
  long pde_solves = 0;
};

/// Misfit value, optional adjoint-state gradient with respect to m, and the
/// always-computed least-squares residual. One factorization per frequency is
/// shared by the forward and adjoint solves; `weights` (empty = all ones)
/// scales per-frequency contributions to value and gradient (not to
/// ls_residual). Frequencies run concurrently when threads > 1; the reduction
/// order is fixed, so results do not depend on the thread count.
MisfitEval misfit_eval(const GridModel2D& m, const AcquisitionGeometry& geom,
                       const FrequencyData& data, const Penalty& penalty,
                       const BoundaryConfig& bc, bool need_gradient,
                       const Vector& weights = Vector(), int threads = 1);

/// Adjoint-state gradient of sum_w rho(S H(m)^-1 Q - D) with respect to m.
Vector misfit_gradient(const GridModel2D& m, const AcquisitionGeometry& geom,
                       const FrequencyData& data, const Penalty& penalty,
                       const BoundaryConfig& bc);

}  // namespace fwopt
