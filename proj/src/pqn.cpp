#include "fwopt/pqn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace fwopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_step(double a, const SolverConfig& cfg) {
  if (!(a > 0.0) || !std::isfinite(a)) return cfg.step_max;
  return std::clamp(a, cfg.step_min, cfg.step_max);
}

}  // namespace

void SolverConfig::validate() const {
  if (max_outer < 1) throw InvalidInput("solver: max_outer must be >= 1");
  if (!(outer_tol > 0.0)) throw InvalidInput("solver: outer_tol must be positive");
  if (inner_max < 1) throw InvalidInput("solver: inner_max must be >= 1");
  if (!(inner_tol > 0.0)) throw InvalidInput("solver: inner_tol must be positive");
  if (nonmonotone_window < 1) throw InvalidInput("solver: nonmonotone_window must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidInput("solver: armijo_c must be in (0,1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw InvalidInput("solver: backtrack_factor must be in (0,1)");
  }
  if (!(step_min > 0.0 && step_min < step_max)) {
    throw InvalidInput("solver: spectral step bounds must satisfy 0 < step_min < step_max");
  }
  if (lbfgs_capacity < 1) throw InvalidInput("solver: lbfgs_capacity must be >= 1");
  if (!(curvature_tol > 0.0)) throw InvalidInput("solver: curvature_tol must be positive");
  if (max_backtracks < 1) throw InvalidInput("solver: max_backtracks must be >= 1");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::StepCollapse: return "step_collapse";
    case StopReason::Stationary: return "stationary";
    case StopReason::LineSearchFailure: return "line_search_failure";
  }
  return "?";
}

Vector spg_prox_solve(const LbfgsMemory& mem, const Vector& y_k, const Vector& g_k,
                      const Regularizer& reg, const SolverConfig& cfg, int* inner_iters_used) {
  cfg.validate();
  if (y_k.size() != g_k.size() || y_k.size() != mem.dim()) {
    throw InvalidInput("spg: dimension mismatch");
  }

  Vector z = y_k;
  Vector grad = g_k;  // gradient of Q at z
  double q_z = 0.0;   // Q(z) - Q(y_k); the constant term is irrelevant
  double r_z = reg.value(z);
  if (!std::isfinite(r_z)) throw InvalidInput("spg: starting point infeasible for regularizer");

  std::deque<double> window{q_z + r_z};
  double alpha = clamp_step(mem.gamma(), cfg);
  int iters = 0;

  for (int j = 0; j < cfg.inner_max; ++j) {
    const Vector zbar = reg.prox(z - alpha * grad, alpha);
    const Vector d = zbar - z;
    if (d.norm() / alpha <= cfg.inner_tol) break;
    ++iters;

    const Vector bd = mem.hessian_apply(d);
    const double d_bd = d.dot(bd);
    const double g_d = grad.dot(d);
    const double r_zbar = reg.value(zbar);
    const double delta = g_d + r_zbar - r_z;
    if (!(delta < 0.0) || !std::isfinite(q_z + r_z)) break;

    const double f_max = *std::max_element(window.begin(), window.end());
    double lambda = 1.0;
    bool accepted = false;
    double q_try = 0.0, r_try = 0.0;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      q_try = q_z + lambda * g_d + 0.5 * lambda * lambda * d_bd;
      r_try = (lambda == 1.0) ? r_zbar : reg.value(z + lambda * d);
      if (q_try + r_try <= f_max + cfg.armijo_c * lambda * delta) {
        accepted = true;
        break;
      }
      lambda *= cfg.backtrack_factor;
    }
    if (!accepted) break;

    z += lambda * d;
    grad += lambda * bd;  // grad Q(z + lambda d) = grad + lambda B d
    q_z = q_try;
    r_z = r_try;
    window.push_back(q_z + r_z);
    while (static_cast<int>(window.size()) > cfg.nonmonotone_window) window.pop_front();

    // BB1 spectral step for the quadratic: s = lambda d, t = B s, so
    // <s,s>/<s,t> = <d,d>/<d,Bd> independent of lambda.
    alpha = d_bd > 0.0 ? clamp_step(d.dot(d) / d_bd, cfg) : cfg.step_max;
  }

  if (inner_iters_used) *inner_iters_used = iters;
  return z;
}

Vector steepest_fallback(const LbfgsMemory& mem, const Vector& y_k, const Vector& g_k,
                         const Regularizer& reg) {
  const double gamma = mem.gamma();
  return reg.prox(y_k - gamma * g_k, gamma) - y_k;
}

MinimizeResult minimize_composite(const SmoothFn& smooth, const Regularizer& reg,
                                  const Vector& y0, const SolverConfig& cfg,
                                  const IterateCallback& on_iterate) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t_start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  Vector y = y0;
  if (reg.is_indicator() && !std::isfinite(reg.value(y))) y = reg.prox(y, 1.0);

  long cum_solves = 0;
  SmoothEval se = smooth(y, true);
  cum_solves += se.pde_solves;
  double reg_v = reg.value(y);
  if (!std::isfinite(reg_v) || !std::isfinite(se.value)) {
    throw InvalidInput("minimize: composite objective not finite at the starting point");
  }
  double phi = se.value + reg_v;
  Vector g = se.gradient;

  LbfgsMemory mem(y.size(), cfg.lbfgs_capacity, cfg.curvature_tol);
  auto prox_grad_norm = [&reg](const Vector& yy, const Vector& gg) {
    return (yy - reg.prox(yy - gg, 1.0)).norm();
  };

  MinimizeResult res;
  res.trace.reserve(static_cast<std::size_t>(cfg.max_outer) + 1);
  std::deque<double> window{phi};

  double pg = prox_grad_norm(y, g);
  const double tol = cfg.outer_tol * pg;

  auto record = [&](int it, double step, int inner, double pg_now) {
    IterationRecord r;
    r.iter = it;
    r.phi = phi;
    r.misfit = se.value;
    r.reg = reg_v;
    r.ls_residual = se.ls_residual;
    r.prox_grad_norm = pg_now;
    r.step = step;
    r.inner_iters = inner;
    r.pde_solves = cum_solves;
    r.wall_ms = elapsed_ms();
    res.trace.push_back(r);
    if (on_iterate) on_iterate(r, y);
  };
  record(0, 0.0, 0, pg);

  Vector best_y = y;
  double best_phi = phi;
  res.stop = StopReason::MaxIterations;

  if (pg == 0.0) {
    res.stop = StopReason::Tolerance;
    res.y = best_y;
    res.phi = best_phi;
    return res;
  }

  for (int k = 1; k <= cfg.max_outer; ++k) {
    int inner_used = 0;
    const Vector yhat = spg_prox_solve(mem, y, g, reg, cfg, &inner_used);
    Vector d = yhat - y;
    double delta = g.dot(d) + reg.value(yhat) - reg_v;
    if (!(delta < 0.0)) {
      d = steepest_fallback(mem, y, g, reg);
      delta = g.dot(d) + reg.value(y + d) - reg_v;
      if (!(delta < 0.0)) {
        res.stop = pg <= tol ? StopReason::Tolerance : StopReason::Stationary;
        break;
      }
    }

    const double phi_max = *std::max_element(window.begin(), window.end());
    double eta = 1.0;
    bool accepted = false;
    Vector y_try;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      y_try = y + eta * d;
      double phi_try = kInf;
      try {
        const SmoothEval v = smooth(y_try, false);
        cum_solves += v.pde_solves;
        phi_try = v.value + reg.value(y_try);
      } catch (const InvalidModel&) {
        // out-of-domain trial point: keep backtracking
      }
      if (std::isfinite(phi_try) && phi_try <= phi_max + cfg.armijo_c * eta * delta) {
        accepted = true;
        break;
      }
      eta *= cfg.backtrack_factor;
    }
    if (!accepted) {
      res.degraded = true;
      res.stop = StopReason::LineSearchFailure;
      break;
    }

    SmoothEval se_new = smooth(y_try, true);
    cum_solves += se_new.pde_solves;
    const double reg_new = reg.value(y_try);

    mem.update(y_try - y, se_new.gradient - g);
    const double step_norm = eta * d.norm();
    y = std::move(y_try);
    se = std::move(se_new);
    g = se.gradient;
    reg_v = reg_new;
    phi = se.value + reg_v;
    window.push_back(phi);
    while (static_cast<int>(window.size()) > cfg.nonmonotone_window) window.pop_front();
    if (phi < best_phi) {
      best_phi = phi;
      best_y = y;
    }

    pg = prox_grad_norm(y, g);
    record(k, eta, inner_used, pg);

    if (pg <= tol) {
      // independent stationarity re-check, not trusting loop bookkeeping
      const double pg_fresh = (y - reg.prox(y - g, 1.0)).norm();
      if (pg_fresh <= tol) {
        res.stop = StopReason::Tolerance;
        break;
      }
    }
    if (step_norm <= 1e-14 * std::max(1.0, y.norm())) {
      res.stop = StopReason::StepCollapse;
      break;
    }
  }

  res.y = std::move(best_y);
  res.phi = best_phi;
  return res;
}

MinimizeResult minimize(const CompositeProblem& p, const Vector& y0, const SolverConfig& cfg,
                        const IterateCallback& on_iterate) {
  p.validate();
  const SmoothFn fn = [&p](const Vector& y, bool need_gradient) {
    const EvalRecord r = need_gradient ? eval_smooth(p, y) : eval_smooth_value(p, y);
    SmoothEval out;
    out.value = r.smooth_value;
    out.gradient = r.smooth_gradient;
    out.ls_residual = r.ls_residual;
    out.pde_solves = r.pde_solve_count;
    return out;
  };
  return minimize_composite(fn, p.regularizer, y0, cfg, on_iterate);
}

}  // namespace fwopt
