#include "fwopt/helmholtz.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <iostream>
#include <sstream>
#include <vector>

namespace fwopt {

namespace {

std::atomic<long> g_solve_count{0};

void require_valid_boundary(const BoundaryConfig& bc) {
  if (bc.width < 0) throw InvalidInput("boundary: sponge width must be >= 0");
  if (!(bc.gamma_max >= 0.0) || !std::isfinite(bc.gamma_max)) {
    throw InvalidInput("boundary: gamma_max must be nonnegative and finite");
  }
}

}  // namespace

void GridModel2D::validate() const {
  if (nz < 8 || nx < 8) throw InvalidInput("grid: nz and nx must be >= 8");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("grid: spacing h must be positive");
  if (m.size() != size()) throw InvalidInput("grid: field length does not match nz*nx");
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m(i)) || m(i) <= 0.0) {
      throw InvalidInput("grid: squared slowness must be positive and finite");
    }
  }
}

Vector sponge_profile(int nz, int nx, const BoundaryConfig& bc) {
  require_valid_boundary(bc);
  Vector gamma = Vector::Zero(static_cast<Eigen::Index>(nz) * nx);
  if (bc.width == 0 || bc.gamma_max == 0.0) return gamma;
  const double w = static_cast<double>(bc.width);
  for (int x = 0; x < nx; ++x) {
    for (int z = 0; z < nz; ++z) {
      const int d = std::min(std::min(z, nz - 1 - z), std::min(x, nx - 1 - x));
      if (d < bc.width) {
        const double r = (w - static_cast<double>(d)) / w;
        gamma(static_cast<Eigen::Index>(x) * nz + z) = bc.gamma_max * r * r;
      }
    }
  }
  return gamma;
}

Eigen::SparseMatrix<Complex> assemble(const GridModel2D& m, double omega,
                                      const BoundaryConfig& bc) {
  m.validate();
  require_valid_boundary(bc);
  if (omega < 0.0 || !std::isfinite(omega)) {
    throw InvalidInput("assemble: omega must be nonnegative and finite");
  }
  const int nz = m.nz, nx = m.nx;
  const Eigen::Index n = m.size();
  const double inv_h2 = 1.0 / (m.h * m.h);
  const Vector gamma = sponge_profile(nz, nx, bc);

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  for (int x = 0; x < nx; ++x) {
    for (int z = 0; z < nz; ++z) {
      const Eigen::Index i = m.flat(z, x);
      const Complex m_c = m.m(i) * Complex(1.0, -gamma(i));
      trips.emplace_back(i, i, omega * omega * m_c - 4.0 * inv_h2);
      if (z > 0) trips.emplace_back(i, i - 1, Complex(inv_h2, 0.0));
      if (z + 1 < nz) trips.emplace_back(i, i + 1, Complex(inv_h2, 0.0));
      if (x > 0) trips.emplace_back(i, i - nz, Complex(inv_h2, 0.0));
      if (x + 1 < nx) trips.emplace_back(i, i + nz, Complex(inv_h2, 0.0));
    }
  }
  Eigen::SparseMatrix<Complex> H(n, n);
  H.setFromTriplets(trips.begin(), trips.end());
  H.makeCompressed();
  return H;
}

HelmholtzOperator::HelmholtzOperator(const GridModel2D& m, double omega,
                                     const BoundaryConfig& bc)
    : omega_(omega), gamma_(sponge_profile(m.nz, m.nx, bc)), H_(assemble(m, omega, bc)) {
  lu_.compute(H_);
  if (lu_.info() != Eigen::Success) {
    std::ostringstream oss;
    oss << "helmholtz: factorization failed at omega = " << omega_
        << " (singular or near-singular operator)";
    throw NumericalFailure(oss.str());
  }
}

void HelmholtzOperator::check_residual(const ComplexMatrix& u, const ComplexMatrix& q) const {
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const double qn = q.col(c).norm();
    if (qn == 0.0) continue;
    const double rn = (H_ * u.col(c) - q.col(c)).norm();
    if (!(rn <= 1e-10 * qn)) {
      std::ostringstream oss;
      oss << "helmholtz: solve at omega = " << omega_ << " lost accuracy (relative residual "
          << rn / qn << "); operator is near-singular";
      throw NumericalFailure(oss.str());
    }
  }
}

ComplexVector HelmholtzOperator::solve(const ComplexVector& q) const {
  if (q.size() != H_.rows()) throw InvalidInput("helmholtz solve: rhs length mismatch");
  g_solve_count.fetch_add(1, std::memory_order_relaxed);
  if (q.isZero(0.0)) return ComplexVector::Zero(q.size());
  ComplexVector u = lu_.solve(q);
  check_residual(u, q);
  return u;
}

ComplexVector HelmholtzOperator::solve_adjoint(const ComplexVector& b) const {
  if (b.size() != H_.rows()) throw InvalidInput("helmholtz solve_adjoint: rhs length mismatch");
  g_solve_count.fetch_add(1, std::memory_order_relaxed);
  if (b.isZero(0.0)) return ComplexVector::Zero(b.size());
  ComplexVector v = lu_.adjoint().solve(b);
  const double bn = b.norm();
  const double rn = (H_.adjoint() * v - b).norm();
  if (!(rn <= 1e-10 * bn)) {
    std::ostringstream oss;
    oss << "helmholtz: adjoint solve at omega = " << omega_
        << " lost accuracy (relative residual " << rn / bn << ")";
    throw NumericalFailure(oss.str());
  }
  return v;
}

ComplexMatrix HelmholtzOperator::solve(const ComplexMatrix& q) const {
  ComplexMatrix u(q.rows(), q.cols());
  for (Eigen::Index c = 0; c < q.cols(); ++c) u.col(c) = solve(ComplexVector(q.col(c)));
  return u;
}

ComplexMatrix HelmholtzOperator::solve_adjoint(const ComplexMatrix& b) const {
  ComplexMatrix v(b.rows(), b.cols());
  for (Eigen::Index c = 0; c < b.cols(); ++c) v.col(c) = solve_adjoint(ComplexVector(b.col(c)));
  return v;
}

long HelmholtzOperator::total_solve_count() { return g_solve_count.load(); }

void validate_geometry(const GridModel2D& m, const AcquisitionGeometry& geom,
                       const BoundaryConfig& bc) {
  m.validate();
  require_valid_boundary(bc);
  if (geom.sources.empty()) throw InvalidInput("geometry: needs at least one source");
  if (geom.receivers.empty()) throw InvalidInput("geometry: needs at least one receiver");
  if (geom.omegas.empty()) throw InvalidInput("geometry: needs at least one frequency");
  for (double w : geom.omegas) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidInput("geometry: frequencies must be positive and finite");
    }
  }
  if (geom.source_weights.size() != 0 &&
      geom.source_weights.size() != static_cast<Eigen::Index>(geom.sources.size())) {
    throw InvalidInput("geometry: source_weights length must match source count");
  }
  auto check_interior = [&](const GridIndex& g, const char* what, std::size_t k) {
    const int w = bc.width;
    if (g.z < w || g.z > m.nz - 1 - w || g.x < w || g.x > m.nx - 1 - w) {
      std::ostringstream oss;
      oss << "geometry: " << what << " " << k << " at (z=" << g.z << ", x=" << g.x
          << ") is outside the non-absorbing interior of the " << m.nz << "x" << m.nx
          << " grid (sponge width " << w << ")";
      throw InvalidInput(oss.str());
    }
  };
  for (std::size_t k = 0; k < geom.sources.size(); ++k) check_interior(geom.sources[k], "source", k);
  for (std::size_t k = 0; k < geom.receivers.size(); ++k) check_interior(geom.receivers[k], "receiver", k);

  // Dispersion guard: shortest wavelength should span >= 8 grid points.
  const double m_max = m.m.maxCoeff();
  const double omega_max = *std::max_element(geom.omegas.begin(), geom.omegas.end());
  const double min_wavelength = 2.0 * M_PI / (omega_max * std::sqrt(m_max));
  if (min_wavelength < 8.0 * m.h) {
    std::cerr << "[fwopt] warning: " << min_wavelength / m.h
              << " grid points per wavelength at omega = " << omega_max
              << " (want >= 8); expect dispersion error\n";
  }
}

namespace {

// Source matrix Q: unit point masses scaled by 1/h^2, times per-source weight.
ComplexMatrix source_matrix(const GridModel2D& m, const AcquisitionGeometry& geom) {
  ComplexMatrix q = ComplexMatrix::Zero(m.size(), geom.n_src());
  const double inv_h2 = 1.0 / (m.h * m.h);
  for (int s = 0; s < geom.n_src(); ++s) {
    q(m.flat(geom.sources[s].z, geom.sources[s].x), s) = geom.weight(s) * inv_h2;
  }
  return q;
}

ComplexMatrix sample_receivers(const GridModel2D& m, const AcquisitionGeometry& geom,
                               const ComplexMatrix& u) {
  ComplexMatrix d(geom.n_recv(), u.cols());
  for (int r = 0; r < geom.n_recv(); ++r) {
    d.row(r) = u.row(m.flat(geom.receivers[r].z, geom.receivers[r].x));
  }
  return d;
}

ComplexMatrix spread_receivers(const GridModel2D& m, const AcquisitionGeometry& geom,
                               const ComplexMatrix& g) {
  ComplexMatrix b = ComplexMatrix::Zero(m.size(), g.cols());
  for (int r = 0; r < geom.n_recv(); ++r) {
    b.row(m.flat(geom.receivers[r].z, geom.receivers[r].x)) += g.row(r);
  }
  return b;
}

struct FrequencyWork {
  ComplexMatrix predicted;
  double value = 0.0;
  double ls_residual = 0.0;
  Vector gradient;
  long solves = 0;
};

FrequencyWork eval_one_frequency(const GridModel2D& m, const AcquisitionGeometry& geom,
                                 const BoundaryConfig& bc, double omega,
                                 const ComplexMatrix* observed, const Penalty* penalty,
                                 double weight, bool need_gradient) {
  FrequencyWork out;
  HelmholtzOperator op(m, omega, bc);
  const ComplexMatrix q = source_matrix(m, geom);
  const ComplexMatrix u = op.solve(q);
  out.solves += q.cols();
  out.predicted = sample_receivers(m, geom, u);
  if (observed == nullptr) return out;

  const ComplexMatrix residual = out.predicted - *observed;
  out.value = weight * penalty->value(residual);
  out.ls_residual = residual.squaredNorm();
  if (!need_gradient) return out;

  ComplexMatrix g = penalty->gradient(residual);
  if (weight != 1.0) g *= weight;
  const ComplexMatrix v = op.solve_adjoint(spread_receivers(m, geom, g));
  out.solves += g.cols();

  // g_i = -Re( w^2 (1 - i*gamma_i) * sum_s conj(v_{s,i}) u_{s,i} );
  // the sponge factor rides along because it is part of dH/dm.
  out.gradient = Vector::Zero(m.size());
  const double w2 = omega * omega;
  for (Eigen::Index s = 0; s < u.cols(); ++s) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const Complex c = Complex(1.0, -op.gamma()(i)) * std::conj(v(i, s)) * u(i, s);
      out.gradient(i) -= w2 * c.real();
    }
  }
  return out;
}

std::vector<FrequencyWork> run_frequencies(const GridModel2D& m,
                                           const AcquisitionGeometry& geom,
                                           const BoundaryConfig& bc,
                                           const FrequencyData* data, const Penalty* penalty,
                                           const Vector& weights, bool need_gradient,
                                           int threads) {
  const int nf = geom.n_freq();
  std::vector<FrequencyWork> work(static_cast<std::size_t>(nf));
  auto run = [&](int f) {
    const ComplexMatrix* observed = data ? &data->slices[static_cast<std::size_t>(f)] : nullptr;
    const double w = weights.size() ? weights(f) : 1.0;
    work[static_cast<std::size_t>(f)] =
        eval_one_frequency(m, geom, bc, geom.omegas[static_cast<std::size_t>(f)], observed,
                           penalty, w, need_gradient);
  };
  if (threads <= 1 || nf <= 1) {
    for (int f = 0; f < nf; ++f) run(f);
  } else {
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) futs.push_back(std::async(std::launch::async, run, f));
    for (auto& fut : futs) fut.get();
  }
  return work;
}

}  // namespace

FrequencyData predict_data(const GridModel2D& m, const AcquisitionGeometry& geom,
                           const BoundaryConfig& bc) {
  validate_geometry(m, geom, bc);
  FrequencyData out;
  out.omegas = geom.omegas;
  auto work = run_frequencies(m, geom, bc, nullptr, nullptr, Vector(), false, 1);
  out.slices.reserve(work.size());
  for (auto& w : work) out.slices.push_back(std::move(w.predicted));
  return out;
}

MisfitEval misfit_eval(const GridModel2D& m, const AcquisitionGeometry& geom,
                       const FrequencyData& data, const Penalty& penalty,
                       const BoundaryConfig& bc, bool need_gradient, const Vector& weights,
                       int threads) {
  validate_geometry(m, geom, bc);
  if (data.n_freq() != geom.n_freq()) {
    throw InvalidInput("misfit: data frequency count does not match geometry");
  }
  for (int f = 0; f < data.n_freq(); ++f) {
    const auto& d = data.slices[static_cast<std::size_t>(f)];
    if (d.rows() != geom.n_recv() || d.cols() != geom.n_src()) {
      throw InvalidInput("misfit: data slice shape does not match geometry");
    }
  }
  if (weights.size() != 0 && weights.size() != geom.n_freq()) {
    throw InvalidInput("misfit: frequency weight count mismatch");
  }

  auto work = run_frequencies(m, geom, bc, &data, &penalty, weights, need_gradient, threads);

  // Deterministic reduction in frequency order regardless of thread count.
  MisfitEval out;
  if (need_gradient) out.gradient = Vector::Zero(m.size());
  for (const auto& w : work) {
    out.value += w.value;
    out.ls_residual += w.ls_residual;
    out.pde_solves += w.solves;
    if (need_gradient) out.gradient += w.gradient;
  }
  return out;
}

Vector misfit_gradient(const GridModel2D& m, const AcquisitionGeometry& geom,
                       const FrequencyData& data, const Penalty& penalty,
                       const BoundaryConfig& bc) {
  return misfit_eval(m, geom, data, penalty, bc, true).gradient;
}

}  // namespace fwopt
