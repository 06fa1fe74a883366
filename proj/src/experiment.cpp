#include "fwopt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace fwopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw InvalidInput("config: field '" + field + "': " + why);
}

const json& need(const json& j, const std::string& field, const std::string& path) {
  auto it = j.find(field);
  if (it == j.end()) fail(path.empty() ? field : path + "." + field, "missing");
  return *it;
}

template <typename T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& field, const std::string& path, T fallback) {
  auto it = j.find(field);
  if (it == j.end()) return fallback;
  return get_as<T>(*it, path + "." + field);
}

std::vector<GridIndex> parse_index_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [z, x] pairs");
  std::vector<GridIndex> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2) fail(path, "each entry must be a [z, x] pair");
    out.push_back(GridIndex{get_as<int>(e[0], path), get_as<int>(e[1], path)});
  }
  return out;
}

ModelSpec parse_model(const json& j) {
  ModelSpec spec;
  spec.nz = get_or<int>(j, "nz", "model", spec.nz);
  spec.nx = get_or<int>(j, "nx", "model", spec.nx);
  spec.h = get_or<double>(j, "h", "model", spec.h);
  if (auto it = j.find("layers"); it != j.end()) {
    if (!it->is_array() || it->empty()) fail("model.layers", "expected a nonempty array");
    spec.layers.clear();
    for (const auto& l : *it) {
      LayerSpec layer;
      layer.velocity = get_as<double>(need(l, "velocity", "model.layers"), "model.layers.velocity");
      layer.thickness_frac = get_or<double>(l, "thickness_frac", "model.layers", 1.0);
      spec.layers.push_back(layer);
    }
  }
  if (auto it = j.find("blobs"); it != j.end()) {
    for (const auto& b : *it) {
      BlobSpec blob;
      blob.dv = get_as<double>(need(b, "dv", "model.blobs"), "model.blobs.dv");
      blob.z_frac = get_or<double>(b, "z_frac", "model.blobs", 0.5);
      blob.x_frac = get_or<double>(b, "x_frac", "model.blobs", 0.5);
      blob.sigma_frac = get_or<double>(b, "sigma_frac", "model.blobs", 0.1);
      spec.blobs.push_back(blob);
    }
  }
  spec.random_blobs = get_or<int>(j, "random_blobs", "model", 0);
  spec.random_blob_dv = get_or<double>(j, "random_blob_dv", "model", spec.random_blob_dv);
  return spec;
}

Penalty parse_penalty(const json& j) {
  const auto kind = get_as<std::string>(need(j, "kind", "penalty"), "penalty.kind");
  if (kind == "ls" || kind == "least_squares") return Penalty::least_squares();
  if (kind == "huber") {
    return Penalty::huber(get_as<double>(need(j, "kappa", "penalty"), "penalty.kappa"));
  }
  if (kind == "student_t") {
    return Penalty::student_t(get_as<double>(need(j, "nu", "penalty"), "penalty.nu"));
  }
  fail("penalty.kind", "expected one of ls, huber, student_t (got '" + kind + "')");
}

RegularizerSpec parse_regularizer(const json& j) {
  RegularizerSpec spec;
  const auto kind = get_as<std::string>(need(j, "kind", "regularizer"), "regularizer.kind");
  if (kind == "zero") {
    spec.kind = RegularizerKind::Zero;
  } else if (kind == "box") {
    spec.kind = RegularizerKind::Box;
    spec.lo = get_as<double>(need(j, "lo", "regularizer"), "regularizer.lo");
    spec.hi = get_as<double>(need(j, "hi", "regularizer"), "regularizer.hi");
    if (!(spec.lo <= spec.hi)) fail("regularizer.lo", "requires lo <= hi");
  } else if (kind == "l1_penalty") {
    spec.kind = RegularizerKind::L1Penalty;
    spec.lambda = get_as<double>(need(j, "lambda", "regularizer"), "regularizer.lambda");
  } else if (kind == "l1_ball") {
    spec.kind = RegularizerKind::L1Ball;
    spec.tau = get_as<double>(need(j, "tau", "regularizer"), "regularizer.tau");
  } else if (kind == "tv1d") {
    spec.kind = RegularizerKind::TV1D;
    spec.lambda = get_as<double>(need(j, "lambda", "regularizer"), "regularizer.lambda");
  } else if (kind == "tv2d") {
    spec.kind = RegularizerKind::TV2DAnisotropic;
    spec.lambda = get_as<double>(need(j, "lambda", "regularizer"), "regularizer.lambda");
  } else {
    fail("regularizer.kind", "unknown kind '" + kind + "'");
  }
  return spec;
}

SolverConfig parse_solver(const json& j) {
  SolverConfig s;
  s.max_outer = get_or<int>(j, "max_outer", "solver", s.max_outer);
  s.outer_tol = get_or<double>(j, "outer_tol", "solver", s.outer_tol);
  s.inner_max = get_or<int>(j, "inner_max", "solver", s.inner_max);
  s.inner_tol = get_or<double>(j, "inner_tol", "solver", s.inner_tol);
  s.nonmonotone_window = get_or<int>(j, "nonmonotone_window", "solver", s.nonmonotone_window);
  s.armijo_c = get_or<double>(j, "armijo_c", "solver", s.armijo_c);
  s.backtrack_factor = get_or<double>(j, "backtrack_factor", "solver", s.backtrack_factor);
  s.step_min = get_or<double>(j, "step_min", "solver", s.step_min);
  s.step_max = get_or<double>(j, "step_max", "solver", s.step_max);
  s.lbfgs_capacity = get_or<int>(j, "lbfgs_capacity", "solver", s.lbfgs_capacity);
  s.curvature_tol = get_or<double>(j, "curvature_tol", "solver", s.curvature_tol);
  s.max_backtracks = get_or<int>(j, "max_backtracks", "solver", s.max_backtracks);
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    fail("solver", e.what());
  }
  return s;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");

  if (auto it = j.find("model"); it != j.end()) {
    const auto kind = get_or<std::string>(*it, "kind", "model", "layered");
    if (kind == "file") {
      cfg.model_file = get_as<std::string>(need(*it, "path", "model"), "model.path");
    } else if (kind == "layered") {
      cfg.model = parse_model(*it);
    } else {
      fail("model.kind", "expected 'layered' or 'file'");
    }
  }

  const json& g = need(j, "geometry", "");
  cfg.geometry.omegas = get_as<std::vector<double>>(need(g, "omegas", "geometry"), "geometry.omegas");
  if (auto it = g.find("sources"); it != g.end()) {
    if (it->is_array()) {
      cfg.geometry.sources = parse_index_list(*it, "geometry.sources");
    } else if (it->is_object()) {
      cfg.geometry.source_row = get_as<int>(need(*it, "row", "geometry.sources"), "geometry.sources.row");
      cfg.geometry.source_count =
          get_as<int>(need(*it, "count", "geometry.sources"), "geometry.sources.count");
    } else {
      fail("geometry.sources", "expected an array or {row, count}");
    }
  } else {
    fail("geometry.sources", "missing");
  }
  if (auto it = g.find("receivers"); it != g.end()) {
    if (it->is_array()) {
      cfg.geometry.receivers = parse_index_list(*it, "geometry.receivers");
    } else if (it->is_object()) {
      cfg.geometry.receiver_rows =
          get_as<std::vector<int>>(need(*it, "rows", "geometry.receivers"), "geometry.receivers.rows");
      cfg.geometry.receiver_step = get_or<int>(*it, "step", "geometry.receivers", 1);
    } else {
      fail("geometry.receivers", "expected an array or {rows, step}");
    }
  } else {
    fail("geometry.receivers", "missing");
  }

  if (auto it = j.find("boundary"); it != j.end()) {
    cfg.boundary.width = get_or<int>(*it, "width", "boundary", cfg.boundary.width);
    cfg.boundary.gamma_max = get_or<double>(*it, "gamma_max", "boundary", cfg.boundary.gamma_max);
  }

  cfg.penalty = parse_penalty(need(j, "penalty", ""));
  if (auto it = j.find("regularizer"); it != j.end()) cfg.regularizer = parse_regularizer(*it);

  if (auto it = j.find("transform"); it != j.end()) {
    const auto kind = get_as<std::string>(need(*it, "kind", "transform"), "transform.kind");
    if (kind == "identity") {
      cfg.transform.kind = TransformKind::Identity;
    } else if (kind == "haar2d") {
      cfg.transform.kind = TransformKind::HaarWavelet2D;
      cfg.transform.levels = get_or<int>(*it, "levels", "transform", 1);
    } else {
      fail("transform.kind", "expected 'identity' or 'haar2d'");
    }
  }

  if (auto it = j.find("solver"); it != j.end()) cfg.solver = parse_solver(*it);

  if (auto it = j.find("data"); it != j.end()) {
    const auto kind = get_or<std::string>(*it, "kind", "data", "synth");
    if (kind == "file") {
      cfg.data.kind = DataSpec::Kind::File;
      cfg.data.path = get_as<std::string>(need(*it, "path", "data"), "data.path");
    } else if (kind == "synth") {
      cfg.data.kind = DataSpec::Kind::Synth;
      cfg.data.noise.snr_db = get_or<double>(*it, "snr_db", "data", cfg.data.noise.snr_db);
      cfg.data.noise.outlier_fraction =
          get_or<double>(*it, "outlier_fraction", "data", cfg.data.noise.outlier_fraction);
      cfg.data.noise.outlier_amplitude =
          get_or<double>(*it, "outlier_amplitude", "data", cfg.data.noise.outlier_amplitude);
    } else {
      fail("data.kind", "expected 'synth' or 'file'");
    }
  }

  if (auto it = j.find("start"); it != j.end()) {
    const auto kind = get_or<std::string>(*it, "kind", "start", "blur");
    if (kind == "blur") {
      cfg.start.kind = StartSpec::Kind::Blur;
      cfg.start.sigma_cells = get_or<double>(*it, "sigma_cells", "start", cfg.start.sigma_cells);
    } else if (kind == "file") {
      cfg.start.kind = StartSpec::Kind::File;
      cfg.start.path = get_as<std::string>(need(*it, "path", "start"), "start.path");
    } else if (kind == "true") {
      cfg.start.kind = StartSpec::Kind::True;
    } else {
      fail("start.kind", "expected 'blur', 'file', or 'true'");
    }
  }

  if (auto it = j.find("physical_bounds"); it != j.end()) {
    VelocityBounds vb;
    vb.v_min = get_as<double>(need(*it, "v_min", "physical_bounds"), "physical_bounds.v_min");
    vb.v_max = get_as<double>(need(*it, "v_max", "physical_bounds"), "physical_bounds.v_max");
    if (!(vb.v_min > 0.0 && vb.v_min < vb.v_max)) {
      fail("physical_bounds", "requires 0 < v_min < v_max");
    }
    cfg.velocity_bounds = vb;
  }

  cfg.freq_weights = get_or<std::vector<double>>(j, "freq_weights", "", {});
  cfg.seed = get_or<std::uint64_t>(j, "seed", "", 0);
  cfg.out_dir = get_or<std::string>(j, "out", "", cfg.out_dir);
  cfg.threads = get_or<int>(j, "threads", "", 1);
  if (cfg.threads < 1) fail("threads", "must be >= 1");
  cfg.timing_in_csv = get_or<bool>(j, "timing_in_csv", "", false);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("config: invalid JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (!cfg.model_file.empty()) {
    j["model"] = {{"kind", "file"}, {"path", cfg.model_file}};
  } else {
    json layers = json::array();
    for (const auto& l : cfg.model.layers) {
      layers.push_back({{"velocity", l.velocity}, {"thickness_frac", l.thickness_frac}});
    }
    json blobs = json::array();
    for (const auto& b : cfg.model.blobs) {
      blobs.push_back({{"dv", b.dv}, {"z_frac", b.z_frac}, {"x_frac", b.x_frac},
                       {"sigma_frac", b.sigma_frac}});
    }
    j["model"] = {{"kind", "layered"}, {"nz", cfg.model.nz}, {"nx", cfg.model.nx},
                  {"h", cfg.model.h}, {"layers", layers}, {"blobs", blobs},
                  {"random_blobs", cfg.model.random_blobs},
                  {"random_blob_dv", cfg.model.random_blob_dv}};
  }
  json srcs;
  if (!cfg.geometry.sources.empty()) {
    srcs = json::array();
    for (const auto& s : cfg.geometry.sources) srcs.push_back({s.z, s.x});
  } else {
    srcs = {{"row", cfg.geometry.source_row.value_or(0)}, {"count", cfg.geometry.source_count}};
  }
  json recvs;
  if (!cfg.geometry.receivers.empty()) {
    recvs = json::array();
    for (const auto& r : cfg.geometry.receivers) recvs.push_back({r.z, r.x});
  } else {
    recvs = {{"rows", cfg.geometry.receiver_rows}, {"step", cfg.geometry.receiver_step}};
  }
  j["geometry"] = {{"omegas", cfg.geometry.omegas}, {"sources", srcs}, {"receivers", recvs}};
  j["boundary"] = {{"width", cfg.boundary.width}, {"gamma_max", cfg.boundary.gamma_max}};
  switch (cfg.penalty.kind()) {
    case PenaltyKind::LeastSquares: j["penalty"] = {{"kind", "ls"}}; break;
    case PenaltyKind::Huber: j["penalty"] = {{"kind", "huber"}, {"kappa", cfg.penalty.kappa()}}; break;
    case PenaltyKind::StudentT: j["penalty"] = {{"kind", "student_t"}, {"nu", cfg.penalty.nu()}}; break;
  }
  switch (cfg.regularizer.kind) {
    case RegularizerKind::Zero: j["regularizer"] = {{"kind", "zero"}}; break;
    case RegularizerKind::Box:
      j["regularizer"] = {{"kind", "box"}, {"lo", cfg.regularizer.lo}, {"hi", cfg.regularizer.hi}};
      break;
    case RegularizerKind::L1Penalty:
      j["regularizer"] = {{"kind", "l1_penalty"}, {"lambda", cfg.regularizer.lambda}};
      break;
    case RegularizerKind::L1Ball:
      j["regularizer"] = {{"kind", "l1_ball"}, {"tau", cfg.regularizer.tau}};
      break;
    case RegularizerKind::TV1D:
      j["regularizer"] = {{"kind", "tv1d"}, {"lambda", cfg.regularizer.lambda}};
      break;
    case RegularizerKind::TV2DAnisotropic:
      j["regularizer"] = {{"kind", "tv2d"}, {"lambda", cfg.regularizer.lambda}};
      break;
  }
  if (cfg.transform.kind == TransformKind::Identity) {
    j["transform"] = {{"kind", "identity"}};
  } else {
    j["transform"] = {{"kind", "haar2d"}, {"levels", cfg.transform.levels}};
  }
  j["solver"] = {{"max_outer", cfg.solver.max_outer}, {"outer_tol", cfg.solver.outer_tol},
                 {"inner_max", cfg.solver.inner_max}, {"inner_tol", cfg.solver.inner_tol},
                 {"nonmonotone_window", cfg.solver.nonmonotone_window},
                 {"armijo_c", cfg.solver.armijo_c},
                 {"backtrack_factor", cfg.solver.backtrack_factor},
                 {"step_min", cfg.solver.step_min}, {"step_max", cfg.solver.step_max},
                 {"lbfgs_capacity", cfg.solver.lbfgs_capacity},
                 {"curvature_tol", cfg.solver.curvature_tol},
                 {"max_backtracks", cfg.solver.max_backtracks}};
  if (cfg.data.kind == DataSpec::Kind::File) {
    j["data"] = {{"kind", "file"}, {"path", cfg.data.path}};
  } else {
    j["data"] = {{"kind", "synth"}, {"outlier_fraction", cfg.data.noise.outlier_fraction},
                 {"outlier_amplitude", cfg.data.noise.outlier_amplitude}};
    if (std::isfinite(cfg.data.noise.snr_db)) j["data"]["snr_db"] = cfg.data.noise.snr_db;
  }
  switch (cfg.start.kind) {
    case StartSpec::Kind::Blur:
      j["start"] = {{"kind", "blur"}, {"sigma_cells", cfg.start.sigma_cells}};
      break;
    case StartSpec::Kind::File: j["start"] = {{"kind", "file"}, {"path", cfg.start.path}}; break;
    case StartSpec::Kind::True: j["start"] = {{"kind", "true"}}; break;
  }
  if (cfg.velocity_bounds) {
    j["physical_bounds"] = {{"v_min", cfg.velocity_bounds->v_min},
                            {"v_max", cfg.velocity_bounds->v_max}};
  }
  if (!cfg.freq_weights.empty()) j["freq_weights"] = cfg.freq_weights;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["timing_in_csv"] = cfg.timing_in_csv;
  return j;
}

AcquisitionGeometry resolve_geometry(const GeometrySpec& spec, const GridShape& grid,
                                     const BoundaryConfig& bc) {
  AcquisitionGeometry geom;
  geom.omegas = spec.omegas;
  const int lo_z = bc.width, hi_z = grid.nz - 1 - bc.width;
  const int lo_x = bc.width, hi_x = grid.nx - 1 - bc.width;
  if (lo_x > hi_x || lo_z > hi_z) {
    throw InvalidInput("geometry: sponge leaves no interior cells on this grid");
  }
  if (!spec.sources.empty()) {
    geom.sources = spec.sources;
  } else {
    if (!spec.source_row || spec.source_count < 1) {
      throw InvalidInput("geometry: sources need an explicit list or {row, count}");
    }
    for (int s = 0; s < spec.source_count; ++s) {
      const double f = spec.source_count == 1 ? 0.5
                                              : static_cast<double>(s) / (spec.source_count - 1);
      const int x = lo_x + static_cast<int>(std::llround(f * (hi_x - lo_x)));
      geom.sources.push_back(GridIndex{*spec.source_row, x});
    }
  }
  if (!spec.receivers.empty()) {
    geom.receivers = spec.receivers;
  } else {
    if (spec.receiver_rows.empty() || spec.receiver_step < 1) {
      throw InvalidInput("geometry: receivers need an explicit list or {rows, step}");
    }
    for (int row : spec.receiver_rows) {
      for (int x = lo_x; x <= hi_x; x += spec.receiver_step) {
        geom.receivers.push_back(GridIndex{row, x});
      }
    }
  }
  return geom;
}

namespace {

Regularizer build_regularizer(const RegularizerSpec& spec, const GridShape& grid) {
  switch (spec.kind) {
    case RegularizerKind::Zero: return Regularizer::zero();
    case RegularizerKind::Box:
      return Regularizer::box(Vector::Constant(grid.size(), spec.lo),
                              Vector::Constant(grid.size(), spec.hi));
    case RegularizerKind::L1Penalty: return Regularizer::l1_penalty(spec.lambda);
    case RegularizerKind::L1Ball: return Regularizer::l1_ball(spec.tau);
    case RegularizerKind::TV1D: return Regularizer::tv1d(spec.lambda);
    case RegularizerKind::TV2DAnisotropic:
      return Regularizer::tv2d_anisotropic(spec.lambda, grid.nz, grid.nx);
  }
  throw InvalidInput("regularizer: unknown kind");
}

Transform build_transform(const TransformSpec& spec, const GridShape& grid) {
  if (spec.kind == TransformKind::Identity) return Transform::identity(grid.size());
  return Transform::haar2d(grid.nz, grid.nx, spec.levels);
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  const GridModel2D m_true =
      cfg.model_file.empty() ? synth_model(cfg.model, cfg.seed) : read_model(cfg.model_file);
  const GridShape grid{m_true.nz, m_true.nx, m_true.h};
  const AcquisitionGeometry geom = resolve_geometry(cfg.geometry, grid, cfg.boundary);

  FrequencyData observed;
  if (cfg.data.kind == DataSpec::Kind::File) {
    observed = read_data(cfg.data.path);
  } else {
    observed = synth_data(m_true, geom, cfg.boundary, cfg.data.noise, cfg.seed + 1);
  }

  GridModel2D m_start = m_true;
  switch (cfg.start.kind) {
    case StartSpec::Kind::Blur: m_start = blur_model(m_true, cfg.start.sigma_cells); break;
    case StartSpec::Kind::File: m_start = read_model(cfg.start.path); break;
    case StartSpec::Kind::True: break;
  }

  CompositeProblem p;
  p.grid = grid;
  p.geometry = geom;
  p.observed = std::move(observed);
  p.penalty = cfg.penalty;
  p.regularizer = build_regularizer(cfg.regularizer, grid);
  p.transform = build_transform(cfg.transform, grid);
  p.boundary = cfg.boundary;
  if (cfg.velocity_bounds) {
    p.physical_bounds = PhysicalBounds{1.0 / (cfg.velocity_bounds->v_max * cfg.velocity_bounds->v_max),
                                       1.0 / (cfg.velocity_bounds->v_min * cfg.velocity_bounds->v_min)};
  }
  if (!cfg.freq_weights.empty()) {
    p.freq_weights = Eigen::Map<const Vector>(cfg.freq_weights.data(),
                                              static_cast<Eigen::Index>(cfg.freq_weights.size()));
  }
  p.threads = cfg.threads;

  const Vector y0 = p.transform.adjoint(m_start.m);

  RunArtifacts art;
  art.out_dir = cfg.out_dir;
  art.initial_model_path = cfg.out_dir + "/initial_model.f64";
  art.final_model_path = cfg.out_dir + "/final_model.f64";
  art.trace_csv_path = cfg.out_dir + "/trace.csv";
  art.config_echo_path = cfg.out_dir + "/config.json";
  art.summary_path = cfg.out_dir + "/summary.json";

  write_model(art.initial_model_path, m_start);
  {
    std::ofstream os(art.config_echo_path);
    os << config_to_json(cfg).dump(2) << "\n";
  }

  art.result = minimize(p, y0, cfg.solver);
  art.initial_phi = art.result.trace.front().phi;

  GridModel2D m_final = m_true;
  m_final.m = p.transform.apply(art.result.y);
  write_model(art.final_model_path, m_final);
  write_trace_csv(art.trace_csv_path, art.result.trace, cfg.timing_in_csv);

  art.model_rmse = std::sqrt((m_final.m - m_true.m).squaredNorm() /
                             static_cast<double>(m_true.m.size()));
  art.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          t_start)
                    .count();

  const auto& last = art.result.trace.back();
  nlohmann::json summary{{"final_phi", art.result.phi},
                         {"initial_phi", art.initial_phi},
                         {"model_rmse", art.model_rmse},
                         {"ls_residual", last.ls_residual},
                         {"pde_solves", last.pde_solves},
                         {"outer_iterations", last.iter},
                         {"wall_ms", art.wall_ms},
                         {"stop_reason", to_string(art.result.stop)},
                         {"degraded", art.result.degraded}};
  {
    std::ofstream os(art.summary_path);
    os << summary.dump(2) << "\n";
  }
  return art;
}

std::vector<GradCheckEntry> gradient_check_suite(std::uint64_t seed, int coords) {
  ModelSpec mspec;
  mspec.nz = 12;
  mspec.nx = 12;
  mspec.h = 10.0;
  mspec.layers = {LayerSpec{2000.0, 1.0}, LayerSpec{2400.0, 1.0}};
  mspec.blobs = {BlobSpec{150.0, 0.45, 0.55, 0.15}};
  const GridModel2D m_true = synth_model(mspec, seed);
  const GridShape grid{12, 12, 10.0};
  const BoundaryConfig bc{3, 1.0};

  GeometrySpec gspec;
  gspec.omegas = {25.0, 40.0};
  gspec.source_row = 3;
  gspec.source_count = 2;
  gspec.receiver_rows = {4, 8};
  const AcquisitionGeometry geom = resolve_geometry(gspec, grid, bc);
  const FrequencyData observed = synth_data(m_true, geom, bc, NoiseSpec{}, seed + 1);
  const GridModel2D m_smooth = blur_model(m_true, 1.5);

  std::mt19937_64 rng(seed + 2);
  std::vector<GradCheckEntry> out;
  const std::vector<Penalty> penalties{Penalty::least_squares(), Penalty::huber(1e-3),
                                       Penalty::student_t(1e-6)};
  for (int tk = 0; tk < 2; ++tk) {
    const Transform transform =
        tk == 0 ? Transform::identity(grid.size()) : Transform::haar2d(12, 12, 2);
    for (const auto& pen : penalties) {
      CompositeProblem p;
      p.grid = grid;
      p.geometry = geom;
      p.observed = observed;
      p.penalty = pen;
      p.transform = transform;
      p.boundary = bc;
      const Vector y = transform.adjoint(m_smooth.m);
      const EvalRecord rec = eval_smooth(p, y);

      double worst = 0.0;
      std::uniform_int_distribution<Eigen::Index> pick(0, y.size() - 1);
      for (int c = 0; c < coords; ++c) {
        const Eigen::Index i = pick(rng);
        const double step = std::cbrt(std::numeric_limits<double>::epsilon()) *
                            std::max(std::abs(y(i)), 1e-8);
        Vector yp = y, ym = y;
        yp(i) += step;
        ym(i) -= step;
        const double fp = eval_smooth_value(p, yp).smooth_value;
        const double fm = eval_smooth_value(p, ym).smooth_value;
        const double fd = (fp - fm) / (2.0 * step);
        const double scale = std::max({std::abs(fd), std::abs(rec.smooth_gradient(i)), 1e-300});
        worst = std::max(worst, std::abs(fd - rec.smooth_gradient(i)) / scale);
      }
      out.push_back(GradCheckEntry{pen.name(), transform.name(), worst});
    }
  }
  return out;
}

}  // namespace fwopt
