#pragma once

#include "fwopt/types.hpp"

namespace fwopt {

enum class TransformKind { Identity, HaarWavelet2D };

/// Orthonormal linear map C between coefficient space and model space,
/// m = C y. `apply` is synthesis (coefficients -> model), `adjoint` is the
/// exact adjoint under the Euclidean inner product; for the orthonormal
/// kinds here it coincides with analysis, so adjoint(apply(y)) == y.
class Transform {
 public:
  static Transform identity(Eigen::Index n);
  /// Multi-level 2-D Haar on an nz-by-nx grid (z fastest); both dimensions
  /// must be divisible by 2^levels.
  static Transform haar2d(int nz, int nx, int levels);

  TransformKind kind() const { return kind_; }
  Eigen::Index size() const { return n_; }
  int levels() const { return levels_; }

  Vector apply(const Vector& y) const;
  Vector adjoint(const Vector& m) const;

  std::string name() const;

 private:
  explicit Transform(TransformKind kind) : kind_(kind) {}

  TransformKind kind_;
  Eigen::Index n_ = 0;
  int nz_ = 0, nx_ = 0, levels_ = 0;
};

}  // namespace fwopt
