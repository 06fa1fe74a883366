#include "fwopt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fwopt {

namespace {

constexpr double kVMinLayer = 1500.0;
constexpr double kVMaxLayer = 4500.0;
constexpr double kVMinField = 500.0;
constexpr double kVMaxField = 8000.0;

}  // namespace

GridModel2D synth_model(const ModelSpec& spec, std::uint64_t seed) {
  if (spec.nz < 8 || spec.nx < 8) throw InvalidInput("synth_model: grid must be at least 8x8");
  if (!(spec.h > 0.0)) throw InvalidInput("synth_model: spacing must be positive");
  if (spec.layers.empty()) throw InvalidInput("synth_model: needs at least one layer");
  double total_thickness = 0.0;
  for (const auto& l : spec.layers) {
    if (l.velocity < kVMinLayer || l.velocity > kVMaxLayer) {
      throw InvalidInput("synth_model: layer velocity outside [1500, 4500] m/s");
    }
    if (!(l.thickness_frac > 0.0)) throw InvalidInput("synth_model: layer thickness must be positive");
    total_thickness += l.thickness_frac;
  }
  if (spec.random_blobs < 0) throw InvalidInput("synth_model: random_blobs must be >= 0");

  // velocity field: layer fill, then Gaussian blobs
  Eigen::MatrixXd v(spec.nz, spec.nx);
  {
    int z0 = 0;
    double acc = 0.0;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
      acc += spec.layers[li].thickness_frac;
      const int z1 = (li + 1 == spec.layers.size())
                         ? spec.nz
                         : std::min<int>(spec.nz, static_cast<int>(std::llround(acc / total_thickness * spec.nz)));
      for (int z = z0; z < z1; ++z) v.row(z).setConstant(spec.layers[li].velocity);
      z0 = std::max(z0, z1);
    }
  }

  std::vector<BlobSpec> blobs = spec.blobs;
  if (spec.random_blobs > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> amp(-spec.random_blob_dv, spec.random_blob_dv);
    for (int b = 0; b < spec.random_blobs; ++b) {
      BlobSpec bs;
      bs.dv = amp(rng);
      bs.z_frac = 0.15 + 0.7 * unit(rng);
      bs.x_frac = 0.15 + 0.7 * unit(rng);
      bs.sigma_frac = 0.05 + 0.1 * unit(rng);
      blobs.push_back(bs);
    }
  }
  for (const auto& b : blobs) {
    const double cz = b.z_frac * (spec.nz - 1);
    const double cx = b.x_frac * (spec.nx - 1);
    const double sigma = std::max(0.5, b.sigma_frac * std::min(spec.nz, spec.nx));
    for (int x = 0; x < spec.nx; ++x) {
      for (int z = 0; z < spec.nz; ++z) {
        const double r2 = (z - cz) * (z - cz) + (x - cx) * (x - cx);
        v(z, x) += b.dv * std::exp(-0.5 * r2 / (sigma * sigma));
      }
    }
  }

  GridModel2D model;
  model.nz = spec.nz;
  model.nx = spec.nx;
  model.h = spec.h;
  model.m.resize(model.size());
  for (int x = 0; x < spec.nx; ++x) {
    for (int z = 0; z < spec.nz; ++z) {
      const double vel = v(z, x);
      if (vel < kVMinField || vel > kVMaxField) {
        throw InvalidInput("synth_model: blob perturbation pushed velocity outside [500, 8000] m/s");
      }
      model.m(model.flat(z, x)) = 1.0 / (vel * vel);
    }
  }
  return model;
}

GridModel2D blur_model(const GridModel2D& model, double sigma_cells) {
  model.validate();
  if (!(sigma_cells >= 0.0)) throw InvalidInput("blur_model: sigma must be nonnegative");
  if (sigma_cells == 0.0) return model;

  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_cells)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) {
    kernel[static_cast<std::size_t>(i + radius)] =
        std::exp(-0.5 * (i / sigma_cells) * (i / sigma_cells));
  }

  // truncated kernel, renormalized at the edges
  auto blur_line = [&](const double* in, Eigen::Index stride, Eigen::Index len, double* out) {
    for (Eigen::Index i = 0; i < len; ++i) {
      double acc = 0.0, wsum = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const Eigen::Index j = i + k;
        if (j < 0 || j >= len) continue;
        const double w = kernel[static_cast<std::size_t>(k + radius)];
        acc += w * in[j * stride];
        wsum += w;
      }
      out[i * stride] = acc / wsum;
    }
  };

  GridModel2D out = model;
  Vector tmp = out.m;
  for (int x = 0; x < model.nx; ++x) {
    blur_line(model.m.data() + static_cast<Eigen::Index>(x) * model.nz, 1, model.nz,
              tmp.data() + static_cast<Eigen::Index>(x) * model.nz);
  }
  for (int z = 0; z < model.nz; ++z) {
    blur_line(tmp.data() + z, model.nz, model.nx, out.m.data() + z);
  }
  return out;
}

FrequencyData synth_data(const GridModel2D& m_true, const AcquisitionGeometry& geom,
                         const BoundaryConfig& bc, const NoiseSpec& noise, std::uint64_t seed) {
  if (noise.outlier_fraction < 0.0 || noise.outlier_fraction >= 1.0) {
    throw InvalidInput("synth_data: outlier fraction must be in [0, 1)");
  }
  if (!(noise.outlier_amplitude > 0.0)) {
    throw InvalidInput("synth_data: outlier amplitude must be positive");
  }
  if (std::isnan(noise.snr_db)) throw InvalidInput("synth_data: snr_db must not be NaN");

  FrequencyData data = predict_data(m_true, geom, bc);
  std::mt19937_64 rng(seed);

  if (std::isfinite(noise.snr_db)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double target_ratio = std::pow(10.0, -noise.snr_db / 20.0);
    for (auto& d : data.slices) {
      ComplexMatrix eps(d.rows(), d.cols());
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
          eps(i, j) = Complex(normal(rng), normal(rng));
        }
      }
      const double clean_norm = d.norm();
      const double eps_norm = eps.norm();
      if (clean_norm > 0.0 && eps_norm > 0.0) {
        d += eps * (clean_norm * target_ratio / eps_norm);
      }
    }
  }

  if (noise.outlier_fraction > 0.0) {
    double max_abs = 0.0;
    Eigen::Index total = 0;
    for (const auto& d : data.slices) {
      max_abs = std::max(max_abs, d.cwiseAbs().maxCoeff());
      total += d.size();
    }
    const auto count = static_cast<Eigen::Index>(std::llround(noise.outlier_fraction * total));
    // partial Fisher-Yates over the flattened (frequency, entry) index space
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    for (Eigen::Index k = 0; k < count; ++k) {
      const auto j = k + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(total - k));
      std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
      Eigen::Index flat = idx[static_cast<std::size_t>(k)];
      for (auto& d : data.slices) {
        if (flat < d.size()) {
          const double theta = phase(rng);
          d.data()[flat] = std::polar(noise.outlier_amplitude * max_abs, theta);
          break;
        }
        flat -= d.size();
      }
    }
  }
  return data;
}

}  // namespace fwopt
