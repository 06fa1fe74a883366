#pragma once

#include <string>
#include <vector>

#include "fwopt/pqn.hpp"
#include "fwopt/types.hpp"

namespace fwopt {

/// Model file: raw little-endian float64, row-major with z fastest, plus a
/// sidecar JSON header at `<path>.json` with {nz, nx, h, units}.
void write_model(const std::string& path, const GridModel2D& model);
GridModel2D read_model(const std::string& path);

/// Data file: per-frequency complex matrices as interleaved re/im float64
/// (receiver index fastest, then source, frequencies concatenated in order),
/// plus a sidecar JSON header at `<path>.json` with {n_recv, n_src, omegas}.
void write_data(const std::string& path, const FrequencyData& data);
FrequencyData read_data(const std::string& path);

inline constexpr const char* kTraceCsvHeader =
    "iter,phi,misfit,reg,ls_residual,prox_grad_norm,step,inner_iters,pde_solves,wall_ms";

/// Convergence trace as CSV with the fixed schema above, one row per record.
/// When include_timing is false the wall_ms column is written as 0 so that
/// reruns with the same seed produce byte-identical files.
void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace,
                     bool include_timing);

}  // namespace fwopt
