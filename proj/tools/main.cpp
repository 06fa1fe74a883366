#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fwopt/experiment.hpp"

namespace {

using namespace fwopt;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  ExperimentConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.threads) cfg.threads = *flags.threads;
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--out", flags.out, "override the output path/directory");
  cmd->add_option("--threads", flags.threads, "worker threads over frequencies (1 = reproducible)");
}

int cmd_synth_model(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_with_overrides(flags);
  const GridModel2D model =
      cfg.model_file.empty() ? synth_model(cfg.model, cfg.seed) : read_model(cfg.model_file);
  const std::string path = cfg.out_dir;
  write_model(path, model);
  std::printf("wrote %dx%d model (h = %g m) to %s\n", model.nz, model.nx, model.h, path.c_str());
  return 0;
}

int cmd_synth_data(const CommonFlags& flags, const std::string& model_path) {
  const ExperimentConfig cfg = load_with_overrides(flags);
  const GridModel2D model =
      model_path.empty()
          ? (cfg.model_file.empty() ? synth_model(cfg.model, cfg.seed) : read_model(cfg.model_file))
          : read_model(model_path);
  const GridShape grid{model.nz, model.nx, model.h};
  const AcquisitionGeometry geom = resolve_geometry(cfg.geometry, grid, cfg.boundary);
  const FrequencyData data = synth_data(model, geom, cfg.boundary, cfg.data.noise, cfg.seed + 1);
  write_data(cfg.out_dir, data);
  std::printf("wrote data (%d freq x %d recv x %d src) to %s\n", data.n_freq(), geom.n_recv(),
              geom.n_src(), cfg.out_dir.c_str());
  return 0;
}

int cmd_invert(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_with_overrides(flags);
  const RunArtifacts art = run_experiment(cfg);
  const auto& last = art.result.trace.back();
  std::printf("%-28s %s\n", "output directory:", art.out_dir.c_str());
  std::printf("%-28s %d\n", "outer iterations:", last.iter);
  std::printf("%-28s %.6e -> %.6e\n", "objective:", art.initial_phi, art.result.phi);
  std::printf("%-28s %.6e\n", "model rmse (s^2/m^2):", art.model_rmse);
  std::printf("%-28s %ld\n", "pde solves:", last.pde_solves);
  std::printf("%-28s %s%s\n", "stop reason:", to_string(art.result.stop).c_str(),
              art.result.degraded ? " (degraded)" : "");
  return art.result.degraded ? 2 : 0;
}

int cmd_gradcheck(std::uint64_t seed, int coords) {
  const auto entries = gradient_check_suite(seed, coords);
  double worst = 0.0;
  for (const auto& e : entries) {
    std::printf("penalty %-10s transform %-9s max rel error %.3e\n", e.penalty.c_str(),
                e.transform.c_str(), e.max_rel_error);
    worst = std::max(worst, e.max_rel_error);
  }
  std::printf("max relative error: %.3e\n", worst);
  const bool ok = worst < 1e-5;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fwopt: robust and regularized frequency-domain waveform inversion"};
  app.require_subcommand(1);

  CommonFlags model_flags, data_flags, invert_flags;
  std::string data_model_path;
  std::uint64_t gradcheck_seed = 7;
  int gradcheck_coords = 5;

  auto* sm = app.add_subcommand("synth-model", "synthesize a model and write it to --out");
  add_common(sm, model_flags, true);

  auto* sd = app.add_subcommand("synth-data", "synthesize observed data and write to --out");
  add_common(sd, data_flags, true);
  sd->add_option("--model", data_model_path, "model file (default: synthesize per config)");

  auto* inv = app.add_subcommand("invert", "run a configured inversion experiment");
  add_common(inv, invert_flags, true);

  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of the misfit gradient");
  gc->add_option("--seed", gradcheck_seed, "random seed");
  gc->add_option("--coords", gradcheck_coords, "coordinates probed per combination");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sm->parsed()) return cmd_synth_model(model_flags);
    if (sd->parsed()) return cmd_synth_data(data_flags, data_model_path);
    if (inv->parsed()) return cmd_invert(invert_flags);
    if (gc->parsed()) return cmd_gradcheck(gradcheck_seed, gradcheck_coords);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
