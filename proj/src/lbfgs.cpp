#include "fwopt/lbfgs.hpp"

#include <cmath>

namespace fwopt {

LbfgsMemory::LbfgsMemory(Eigen::Index dim, int capacity, double curvature_tol)
    : dim_(dim), capacity_(capacity), curvature_tol_(curvature_tol) {
  if (dim < 1) throw InvalidInput("lbfgs: dimension must be positive");
  if (capacity < 1) throw InvalidInput("lbfgs: capacity must be positive");
  if (!(curvature_tol > 0.0)) throw InvalidInput("lbfgs: curvature tolerance must be positive");
}

bool LbfgsMemory::update(const Vector& s, const Vector& t) {
  if (s.size() != dim_ || t.size() != dim_) {
    throw InvalidInput("lbfgs update: pair length mismatch");
  }
  const double st = s.dot(t);
  if (!(st > curvature_tol_ * s.norm() * t.norm())) {
    ++skipped_;
    return false;
  }
  Pair p;
  p.s = s;
  p.t = t;
  p.s_t = st;
  pairs_.push_back(std::move(p));
  if (static_cast<int>(pairs_.size()) > capacity_) pairs_.pop_front();
  gamma_ = st / t.squaredNorm();
  rebuild_cache();
  return true;
}

// b_i = B_i s_i where B_i uses pairs [0, i); all levels share the current
// B0 = (1/gamma) I, so the whole cache is rebuilt after every accepted update.
void LbfgsMemory::rebuild_cache() {
  const double sigma = 1.0 / gamma_;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    Vector b = sigma * pairs_[i].s;
    for (std::size_t j = 0; j < i; ++j) {
      const Pair& pj = pairs_[j];
      b += -(pj.bs.dot(pairs_[i].s) / pj.s_bs) * pj.bs +
           (pj.t.dot(pairs_[i].s) / pj.s_t) * pj.t;
    }
    pairs_[i].bs = std::move(b);
    pairs_[i].s_bs = pairs_[i].s.dot(pairs_[i].bs);
  }
}

Vector LbfgsMemory::hessian_apply(const Vector& d) const {
  if (d.size() != dim_) throw InvalidInput("lbfgs hessian_apply: length mismatch");
  Vector r = d / gamma_;
  for (const Pair& p : pairs_) {
    r += -(p.bs.dot(d) / p.s_bs) * p.bs + (p.t.dot(d) / p.s_t) * p.t;
  }
  return r;
}

double LbfgsMemory::quadratic_model(double phi_k, const Vector& y_k, const Vector& g_k,
                                    const Vector& y) const {
  const Vector delta = y - y_k;
  return phi_k + g_k.dot(delta) + 0.5 * delta.dot(hessian_apply(delta));
}

}  // namespace fwopt
