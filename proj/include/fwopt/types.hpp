#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwopt {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Rejected arguments: bad shapes, non-finite entries, out-of-range parameters.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Linear-algebra breakdown (singular or near-singular system, lost accuracy).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A trial model left the physical domain (non-positive squared slowness or
/// violated bounds). Optimization drivers treat this as a backtracking signal,
/// not a fatal error. `index` is the first offending grid cell.
struct InvalidModel : std::runtime_error {
  InvalidModel(const std::string& what, Eigen::Index offending_index)
      : std::runtime_error(what), index(offending_index) {}
  Eigen::Index index;
};

struct GridIndex {
  int z = 0;
  int x = 0;
};

/// Real squared-slowness field (s^2/m^2) on a regular nz-by-nx grid with
/// spacing h. Storage is z-fastest: flat index = x*nz + z, which matches a
/// column-major nz-by-nx matrix.
struct GridModel2D {
  int nz = 0;
  int nx = 0;
  double h = 1.0;
  Vector m;

  Eigen::Index size() const { return static_cast<Eigen::Index>(nz) * nx; }
  Eigen::Index flat(int z, int x) const {
    return static_cast<Eigen::Index>(x) * nz + z;
  }

  void validate() const;
};

/// Point sources and receivers given as grid node indices, plus the set of
/// angular frequencies (rad/s). Sources are unit point masses scaled by 1/h^2;
/// `source_weights` (optional, default all-ones) scales them per source.
struct AcquisitionGeometry {
  std::vector<GridIndex> sources;
  std::vector<GridIndex> receivers;
  std::vector<double> omegas;
  ComplexVector source_weights;  // empty means all ones

  int n_src() const { return static_cast<int>(sources.size()); }
  int n_recv() const { return static_cast<int>(receivers.size()); }
  int n_freq() const { return static_cast<int>(omegas.size()); }

  Complex weight(int s) const {
    return source_weights.size() == 0 ? Complex(1.0, 0.0) : source_weights(s);
  }
};

/// Per-frequency complex data matrices D (n_recv x n_src), one slice per
/// entry of `omegas`, in the same order.
struct FrequencyData {
  std::vector<double> omegas;
  std::vector<ComplexMatrix> slices;

  int n_freq() const { return static_cast<int>(omegas.size()); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& d : slices) s += d.squaredNorm();
    return s;
  }
};

}  // namespace fwopt
