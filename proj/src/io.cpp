#include "fwopt/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace fwopt {

namespace {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; add byte swapping for this platform");

void write_f64(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_f64(std::istream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw InvalidInput("binary file truncated");
}

nlohmann::json read_sidecar(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw InvalidInput("cannot open sidecar header " + path + ".json");
  nlohmann::json j;
  js >> j;
  return j;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  return os;
}

}  // namespace

void write_model(const std::string& path, const GridModel2D& model) {
  model.validate();
  auto os = open_out(path);
  write_f64(os, model.m.data(), static_cast<std::size_t>(model.m.size()));
  if (!os) throw InvalidInput("failed writing " + path);
  nlohmann::json header{{"nz", model.nz}, {"nx", model.nx}, {"h", model.h}, {"units", "s^2/m^2"}};
  auto hs = open_out(path + ".json");
  hs << header.dump(2) << "\n";
}

GridModel2D read_model(const std::string& path) {
  const nlohmann::json header = read_sidecar(path);
  GridModel2D model;
  model.nz = header.at("nz").get<int>();
  model.nx = header.at("nx").get<int>();
  model.h = header.at("h").get<double>();
  model.m.resize(static_cast<Eigen::Index>(model.nz) * model.nx);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open " + path);
  read_f64(is, model.m.data(), static_cast<std::size_t>(model.m.size()));
  model.validate();
  return model;
}

void write_data(const std::string& path, const FrequencyData& data) {
  if (data.slices.size() != data.omegas.size()) {
    throw InvalidInput("write_data: omega/slice count mismatch");
  }
  if (data.slices.empty()) throw InvalidInput("write_data: empty data");
  const Eigen::Index n_recv = data.slices.front().rows();
  const Eigen::Index n_src = data.slices.front().cols();
  auto os = open_out(path);
  for (const auto& d : data.slices) {
    if (d.rows() != n_recv || d.cols() != n_src) {
      throw InvalidInput("write_data: inconsistent slice shapes");
    }
    // std::complex<double> is laid out as {re, im}, already interleaved
    write_f64(os, reinterpret_cast<const double*>(d.data()),
              static_cast<std::size_t>(2 * d.size()));
  }
  if (!os) throw InvalidInput("failed writing " + path);
  nlohmann::json header{{"n_recv", n_recv}, {"n_src", n_src}, {"omegas", data.omegas}};
  auto hs = open_out(path + ".json");
  hs << header.dump(2) << "\n";
}

FrequencyData read_data(const std::string& path) {
  const nlohmann::json header = read_sidecar(path);
  const auto n_recv = header.at("n_recv").get<Eigen::Index>();
  const auto n_src = header.at("n_src").get<Eigen::Index>();
  FrequencyData data;
  data.omegas = header.at("omegas").get<std::vector<double>>();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open " + path);
  data.slices.reserve(data.omegas.size());
  for (std::size_t f = 0; f < data.omegas.size(); ++f) {
    ComplexMatrix d(n_recv, n_src);
    read_f64(is, reinterpret_cast<double*>(d.data()), static_cast<std::size_t>(2 * d.size()));
    data.slices.push_back(std::move(d));
  }
  return data;
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace,
                     bool include_timing) {
  auto os = open_out(path);
  os << kTraceCsvHeader << "\n";
  char buf[512];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%ld,%.3f\n",
                  r.iter, r.phi, r.misfit, r.reg, r.ls_residual, r.prox_grad_norm, r.step,
                  r.inner_iters, r.pde_solves, include_timing ? r.wall_ms : 0.0);
    os << buf;
  }
  if (!os) throw InvalidInput("failed writing " + path);
}

}  // namespace fwopt
