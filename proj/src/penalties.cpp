#include "fwopt/penalties.hpp"

#include <cmath>

namespace fwopt {

namespace {

void require_finite(const ComplexMatrix& r) {
  if (!r.allFinite()) {
    throw InvalidInput("penalty: residual matrix has non-finite entries");
  }
}

}  // namespace

Penalty Penalty::huber(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw InvalidInput("huber: kappa must be positive and finite");
  }
  return Penalty(PenaltyKind::Huber, kappa);
}

Penalty Penalty::student_t(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw InvalidInput("student_t: nu must be positive and finite");
  }
  return Penalty(PenaltyKind::StudentT, nu);
}

double Penalty::value(const ComplexMatrix& r) const {
  require_finite(r);
  switch (kind_) {
    case PenaltyKind::LeastSquares:
      return r.squaredNorm();
    case PenaltyKind::Huber: {
      const double kappa = param_;
      double acc = 0.0;
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          const double t = std::abs(r(i, j));
          acc += (t <= kappa) ? 0.5 * t * t : kappa * t - 0.5 * kappa * kappa;
        }
      }
      return acc;
    }
    case PenaltyKind::StudentT: {
      const double nu = param_;
      double acc = 0.0;
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          acc += std::log(nu + std::norm(r(i, j)));
        }
      }
      return acc;
    }
  }
  throw InvalidInput("penalty: unknown kind");
}

ComplexMatrix Penalty::gradient(const ComplexMatrix& r) const {
  require_finite(r);
  switch (kind_) {
    case PenaltyKind::LeastSquares:
      return 2.0 * r;
    case PenaltyKind::Huber: {
      const double kappa = param_;
      ComplexMatrix g(r.rows(), r.cols());
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          const double t = std::abs(r(i, j));
          // at t == kappa the two branches coincide; keep the quadratic one
          g(i, j) = (t <= kappa) ? r(i, j) : (kappa / t) * r(i, j);
        }
      }
      return g;
    }
    case PenaltyKind::StudentT: {
      const double nu = param_;
      ComplexMatrix g(r.rows(), r.cols());
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          g(i, j) = 2.0 * r(i, j) / (nu + std::norm(r(i, j)));
        }
      }
      return g;
    }
  }
  throw InvalidInput("penalty: unknown kind");
}

std::string Penalty::name() const {
  switch (kind_) {
    case PenaltyKind::LeastSquares: return "ls";
    case PenaltyKind::Huber: return "huber";
    case PenaltyKind::StudentT: return "student_t";
  }
  return "?";
}

}  // namespace fwopt
