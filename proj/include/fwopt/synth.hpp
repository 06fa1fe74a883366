#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fwopt/helmholtz.hpp"
#include "fwopt/types.hpp"

namespace fwopt {

struct LayerSpec {
  double velocity = 2000.0;   // m/s, must lie in [1500, 4500]
  double thickness_frac = 1;  // relative thickness; normalized across layers
};

struct BlobSpec {
  double dv = 0.0;  // velocity perturbation amplitude, m/s
  double z_frac = 0.5, x_frac = 0.5;
  double sigma_frac = 0.1;  // Gaussian radius as a fraction of min(nz,nx)
};

/// Synthetic squared-slowness models: horizontal layers plus optional
/// Gaussian velocity blobs (explicit or seeded-random).
struct ModelSpec {
  int nz = 32, nx = 32;
  double h = 10.0;
  std::vector<LayerSpec> layers{LayerSpec{}};
  std::vector<BlobSpec> blobs;
  int random_blobs = 0;
  double random_blob_dv = 200.0;  // max |dv| of seeded blobs, m/s
};

GridModel2D synth_model(const ModelSpec& spec, std::uint64_t seed);

/// Separable Gaussian blur (sigma in cells, truncated at 3 sigma with edge
/// renormalization). Positivity-preserving, used for smoothed starting models.
GridModel2D blur_model(const GridModel2D& model, double sigma_cells);

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();  // inf = no noise
  double outlier_fraction = 0.0;                            // p in [0, 1)
  double outlier_amplitude = 5.0;                           // a > 0
};

/// Observed data D = predict_data(m_true) + noise. Gaussian noise is scaled
/// per frequency so the Frobenius-norm SNR matches snr_db exactly; then
/// round(p * total entries) entries, chosen uniformly across all frequencies,
/// are replaced by spikes of magnitude a * max|D_clean| with uniform phase.
FrequencyData synth_data(const GridModel2D& m_true, const AcquisitionGeometry& geom,
                         const BoundaryConfig& bc, const NoiseSpec& noise, std::uint64_t seed);

}  // namespace fwopt
