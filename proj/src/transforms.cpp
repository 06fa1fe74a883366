#include "fwopt/transforms.hpp"

#include <cmath>

namespace fwopt {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// One orthonormal Haar split of the leading `len` entries of a strided line:
// pairwise averages into [0, len/2), differences into [len/2, len).
void haar_split(double* p, Eigen::Index stride, Eigen::Index len, std::vector<double>& tmp) {
  const Eigen::Index half = len / 2;
  for (Eigen::Index i = 0; i < half; ++i) {
    const double a = p[2 * i * stride];
    const double b = p[(2 * i + 1) * stride];
    tmp[static_cast<std::size_t>(i)] = (a + b) * kInvSqrt2;
    tmp[static_cast<std::size_t>(half + i)] = (a - b) * kInvSqrt2;
  }
  for (Eigen::Index i = 0; i < len; ++i) p[i * stride] = tmp[static_cast<std::size_t>(i)];
}

// Inverse of haar_split.
void haar_merge(double* p, Eigen::Index stride, Eigen::Index len, std::vector<double>& tmp) {
  const Eigen::Index half = len / 2;
  for (Eigen::Index i = 0; i < half; ++i) {
    const double s = p[i * stride];
    const double d = p[(half + i) * stride];
    tmp[static_cast<std::size_t>(2 * i)] = (s + d) * kInvSqrt2;
    tmp[static_cast<std::size_t>(2 * i + 1)] = (s - d) * kInvSqrt2;
  }
  for (Eigen::Index i = 0; i < len; ++i) p[i * stride] = tmp[static_cast<std::size_t>(i)];
}

}  // namespace

Transform Transform::identity(Eigen::Index n) {
  if (n < 1) throw InvalidInput("transform: size must be positive");
  Transform t(TransformKind::Identity);
  t.n_ = n;
  return t;
}

Transform Transform::haar2d(int nz, int nx, int levels) {
  if (nz < 1 || nx < 1) throw InvalidInput("haar2d: grid shape must be positive");
  if (levels < 1) throw InvalidInput("haar2d: levels must be >= 1");
  const int block = 1 << levels;
  if (nz % block != 0 || nx % block != 0) {
    throw InvalidInput("haar2d: grid dimensions must be divisible by 2^levels");
  }
  Transform t(TransformKind::HaarWavelet2D);
  t.n_ = static_cast<Eigen::Index>(nz) * nx;
  t.nz_ = nz;
  t.nx_ = nx;
  t.levels_ = levels;
  return t;
}

Vector Transform::apply(const Vector& y) const {
  if (y.size() != n_) throw InvalidInput("transform apply: length mismatch");
  if (kind_ == TransformKind::Identity) return y;

  Vector m = y;
  std::vector<double> tmp(static_cast<std::size_t>(std::max(nz_, nx_)));
  // Synthesis: undo levels from coarsest to finest, rows then columns
  // (exact reverse of the analysis order below).
  for (int level = levels_ - 1; level >= 0; --level) {
    const Eigen::Index bz = nz_ >> level;
    const Eigen::Index bx = nx_ >> level;
    for (Eigen::Index z = 0; z < bz; ++z) haar_merge(m.data() + z, nz_, bx, tmp);
    for (Eigen::Index x = 0; x < bx; ++x) haar_merge(m.data() + x * nz_, 1, bz, tmp);
  }
  return m;
}

Vector Transform::adjoint(const Vector& m) const {
  if (m.size() != n_) throw InvalidInput("transform adjoint: length mismatch");
  if (kind_ == TransformKind::Identity) return m;

  Vector y = m;
  std::vector<double> tmp(static_cast<std::size_t>(std::max(nz_, nx_)));
  // Analysis: split columns then rows of the shrinking low-pass block.
  for (int level = 0; level < levels_; ++level) {
    const Eigen::Index bz = nz_ >> level;
    const Eigen::Index bx = nx_ >> level;
    for (Eigen::Index x = 0; x < bx; ++x) haar_split(y.data() + x * nz_, 1, bz, tmp);
    for (Eigen::Index z = 0; z < bz; ++z) haar_split(y.data() + z, nz_, bx, tmp);
  }
  return y;
}

std::string Transform::name() const {
  return kind_ == TransformKind::Identity ? "identity" : "haar2d";
}

}  // namespace fwopt
