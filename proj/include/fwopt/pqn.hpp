#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fwopt/lbfgs.hpp"
#include "fwopt/objective.hpp"
#include "fwopt/regularizers.hpp"
#include "fwopt/types.hpp"

namespace fwopt {

struct SolverConfig {
  int max_outer = 100;
  double outer_tol = 1e-6;  // on the prox-gradient norm, relative to iterate 0
  int inner_max = 100;
  double inner_tol = 1e-8;
  int nonmonotone_window = 10;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double step_min = 1e-10;  // spectral step safeguard bounds
  double step_max = 1e10;
  int lbfgs_capacity = 10;
  double curvature_tol = 1e-10;
  int max_backtracks = 50;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double phi = 0.0;
  double misfit = 0.0;
  double reg = 0.0;
  double ls_residual = 0.0;
  double prox_grad_norm = 0.0;
  double step = 0.0;
  int inner_iters = 0;
  long pde_solves = 0;  // cumulative
  double wall_ms = 0.0;
};

enum class StopReason { Tolerance, MaxIterations, StepCollapse, Stationary, LineSearchFailure };

std::string to_string(StopReason r);

struct MinimizeResult {
  Vector y;                            // best accepted iterate
  double phi = 0.0;                    // its composite objective value
  std::vector<IterationRecord> trace;  // one record per outer iteration, plus iterate 0
  StopReason stop = StopReason::MaxIterations;
  bool degraded = false;  // line search failed before reaching tolerance
};

/// Smooth-part evaluation callback: value and (when requested) gradient.
/// Implementations throw InvalidModel for trial points outside their domain,
/// which the driver treats as "backtrack".
struct SmoothEval {
  double value = 0.0;
  Vector gradient;
  double ls_residual = 0.0;
  long pde_solves = 0;
};
using SmoothFn = std::function<SmoothEval(const Vector& y, bool need_gradient)>;

/// Called after every recorded iteration (including iterate 0) with the
/// record and the current iterate.
using IterateCallback = std::function<void(const IterationRecord&, const Vector&)>;

/// Approximately minimizes Q(z) + R(z) over z, where Q is the convex
/// quadratic model defined by `mem` around (y_k, g_k): spectral proximal
/// gradient with Barzilai-Borwein steps (safeguarded to the config bounds)
/// and nonmonotone acceptance over the last `nonmonotone_window` inner
/// values. Stops when the prox-step displacement ||zbar - z|| / alpha falls
/// under inner_tol or inner_max iterations are reached. The returned point
/// never increases Q + R relative to y_k.
Vector spg_prox_solve(const LbfgsMemory& mem, const Vector& y_k, const Vector& g_k,
                      const Regularizer& reg, const SolverConfig& cfg,
                      int* inner_iters_used = nullptr);

/// Safeguard direction prox(y_k - gamma g_k, gamma) - y_k with gamma the
/// current spectral scaling; a descent direction unless y_k is stationary.
Vector steepest_fallback(const LbfgsMemory& mem, const Vector& y_k, const Vector& g_k,
                         const Regularizer& reg);

/// Proximal quasi-Newton outer loop over an arbitrary smooth part.
MinimizeResult minimize_composite(const SmoothFn& smooth, const Regularizer& reg,
                                  const Vector& y0, const SolverConfig& cfg,
                                  const IterateCallback& on_iterate = {});

/// PQN applied to a full inversion problem (smooth part = PDE data misfit).
MinimizeResult minimize(const CompositeProblem& p, const Vector& y0, const SolverConfig& cfg,
                        const IterateCallback& on_iterate = {});

}  // namespace fwopt
