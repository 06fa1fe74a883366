#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fwopt/io.hpp"
#include "fwopt/objective.hpp"
#include "fwopt/pqn.hpp"
#include "fwopt/synth.hpp"

namespace fwopt {

/// Acquisition described either by explicit index lists or by row shorthand
/// (sources on one row, receivers on one or more rows, spread across the
/// non-absorbing interior).
struct GeometrySpec {
  std::vector<double> omegas;
  std::vector<GridIndex> sources;
  std::vector<GridIndex> receivers;
  std::optional<int> source_row;
  int source_count = 0;
  std::vector<int> receiver_rows;
  int receiver_step = 1;
};

AcquisitionGeometry resolve_geometry(const GeometrySpec& spec, const GridShape& grid,
                                     const BoundaryConfig& bc);

struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::Zero;
  double lambda = 0.0;
  double tau = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct TransformSpec {
  TransformKind kind = TransformKind::Identity;
  int levels = 1;
};

struct StartSpec {
  enum class Kind { Blur, File, True };
  Kind kind = Kind::Blur;
  double sigma_cells = 2.0;
  std::string path;
};

struct DataSpec {
  enum class Kind { Synth, File };
  Kind kind = Kind::Synth;
  NoiseSpec noise;
  std::string path;
};

/// Optional physical velocity bounds; translated to squared-slowness bounds
/// [1/v_max^2, 1/v_min^2] on the post-transform model.
struct VelocityBounds {
  double v_min = 0.0;
  double v_max = 0.0;
};

struct ExperimentConfig {
  ModelSpec model;
  std::string model_file;  // nonempty: load instead of synthesizing
  GeometrySpec geometry;
  BoundaryConfig boundary;
  Penalty penalty = Penalty::least_squares();
  RegularizerSpec regularizer;
  TransformSpec transform;
  SolverConfig solver;
  DataSpec data;
  StartSpec start;
  std::optional<VelocityBounds> velocity_bounds;
  std::vector<double> freq_weights;
  std::uint64_t seed = 0;
  std::string out_dir = "run";
  int threads = 1;
  bool timing_in_csv = false;
};

/// Parses and validates a config; errors carry the offending field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RunArtifacts {
  std::string out_dir;
  std::string initial_model_path;
  std::string final_model_path;
  std::string trace_csv_path;
  std::string config_echo_path;
  std::string summary_path;
  MinimizeResult result;
  double initial_phi = 0.0;
  double model_rmse = 0.0;
  double wall_ms = 0.0;
};

/// Full experiment: synthesize (or load) model and data, build the composite
/// problem, run the solver, and write all artifacts into cfg.out_dir.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

struct GradCheckEntry {
  std::string penalty;
  std::string transform;
  double max_rel_error = 0.0;
};

/// Central finite-difference check of the smooth gradient in transform
/// coordinates for every penalty x transform combination on a small synthetic
/// problem; `coords` random coefficients per combination.
std::vector<GradCheckEntry> gradient_check_suite(std::uint64_t seed, int coords = 5);

}  // namespace fwopt
