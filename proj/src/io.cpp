#include "stomech/io.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace stomech::io {

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void check_open(const std::ofstream& f, const std::string& path) {
  if (!f)
    throw Error(ErrorCode::ConfigError, "cannot open output file: " + path);
}

}  // namespace

json spec_to_json(const DiffusionSpec& spec) {
  return json{{"alpha_mag", spec.alpha_mag}, {"phi", spec.phi},
              {"mass", spec.mass},           {"hbar", spec.hbar},
              {"charge", spec.charge}};
}

DiffusionSpec spec_from_json(const json& j) {
  DiffusionSpec spec;
  spec.alpha_mag = j.value("alpha_mag", 1.0);
  spec.phi = j.value("phi", 0.0);
  spec.mass = j.value("mass", 1.0);
  spec.hbar = j.value("hbar", 1.0);
  spec.charge = j.value("charge", 0.0);
  return validate_spec(spec);
}

json time_grid_to_json(const TimeGrid& g) {
  return json{{"t0", g.t0}, {"tf", g.tf}, {"n_steps", g.n_steps}};
}

TimeGrid time_grid_from_json(const json& j) {
  TimeGrid g;
  g.t0 = j.value("t0", 0.0);
  g.tf = j.value("tf", 1.0);
  g.n_steps = j.value("n_steps", 1000);
  return validate_grid(g);
}

json space_grid_to_json(const SpaceGrid& g) {
  json axes = json::array();
  for (int a = 0; a < g.dim; ++a)
    axes.push_back(json{{"min", g.axis[a].min},
                        {"max", g.axis[a].max},
                        {"n_points", g.axis[a].n_points}});
  return json{{"dim", g.dim}, {"axes", axes}};
}

SpaceGrid space_grid_from_json(const json& j) {
  SpaceGrid g;
  g.dim = j.value("dim", 1);
  const json axes = j.at("axes");
  for (int a = 0; a < g.dim; ++a) {
    g.axis[a].min = axes.at(a).value("min", 0.0);
    g.axis[a].max = axes.at(a).value("max", 1.0);
    g.axis[a].n_points = axes.at(a).value("n_points", 8);
  }
  return validate_grid(g);
}

json make_metadata(const json& spec, const json& extra, uint64_t seed) {
  json m{{"schema_version", kSchemaVersion},
         {"tool_version", kToolVersion},
         {"rng", SeedSpec::kAlgorithm},
         {"seed", seed},
         {"generated_at", now_iso8601()},
         {"spec", spec}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = *it;
  return m;
}

void write_ensemble_ndjson(const std::string& path,
                           const noise::ComplexPathEnsemble& ens,
                           const json& metadata) {
  std::ofstream f(path);
  check_open(f, path);
  json head = metadata;
  head["record"] = "metadata";
  f << head.dump() << "\n";
  char buf[64];
  for (int p = 0; p < ens.n_paths; ++p) {
    f << "{\"record\":\"path\",\"path\":" << p << ",\"m\":[";
    for (int k = 0; k <= ens.n_steps(); ++k)
      for (int c = 0; c < ens.dim; ++c) {
        const Complex z = ens.m(p, k, c);
        std::snprintf(buf, sizeof(buf), "[%.17g,%.17g]", z.real(), z.imag());
        f << buf;
        if (!(k == ens.n_steps() && c == ens.dim - 1)) f << ",";
      }
    f << "]}\n";
  }
}

void write_qv_csv(const std::string& path,
                  const std::vector<noise::RealizedQV>& qvs,
                  const TimeGrid& grid, const json& metadata) {
  std::ofstream f(path);
  check_open(f, path);
  f << "# " << metadata.dump() << "\n";
  f << "t,a,b,conj,re,im\n";
  char buf[96];
  for (const auto& qv : qvs)
    for (size_t k = 0; k < qv.series.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g,%d,%d,%d,%.17g,%.17g\n",
                    grid.time(static_cast<int>(k)), qv.a, qv.b,
                    qv.conjugate_second ? 1 : 0, qv.series[k].real(),
                    qv.series[k].imag());
      f << buf;
    }
}

void write_field_csv(const std::string& path, const pde::WaveField& field,
                     const json& metadata) {
  std::ofstream f(path);
  check_open(f, path);
  f << "# " << metadata.dump() << "\n";
  f << (field.grid.dim == 1 ? "t,x,re_psi,im_psi\n" : "t,x,y,re_psi,im_psi\n");
  char buf[128];
  const int nx = field.grid.axis[0].n_points;
  const int ny = field.grid.dim == 2 ? field.grid.axis[1].n_points : 1;
  for (int s = 0; s < field.n_slices(); ++s) {
    const Complex* psi = field.slice(s);
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        const Complex z = psi[field.grid.index(ix, iy)];
        if (field.grid.dim == 1)
          std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                        field.times[s], field.grid.axis[0].coord(ix), z.real(),
                        z.imag());
        else
          std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                        field.times[s], field.grid.axis[0].coord(ix),
                        field.grid.axis[1].coord(iy), z.real(), z.imag());
        f << buf;
      }
  }
}

void write_norm_trace_csv(const std::string& path, const pde::WaveField& field,
                          const json& metadata) {
  std::ofstream f(path);
  check_open(f, path);
  f << "# " << metadata.dump() << "\n";
  f << "t,l2_norm\n";
  char buf[64];
  for (int s = 0; s < field.n_slices(); ++s) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", field.times[s],
                  field.norm_l2(s));
    f << buf;
  }
}

void write_density_comparison_csv(const std::string& path,
                                  const SpaceGrid& grid,
                                  const std::vector<double>& rho_mc,
                                  const std::vector<double>& rho_psi,
                                  const json& metadata) {
  std::ofstream f(path);
  check_open(f, path);
  f << "# " << metadata.dump() << "\n";
  f << (grid.dim == 1 ? "x,rho_mc,rho_psi\n" : "x,y,rho_mc,rho_psi\n");
  char buf[128];
  const int nx = grid.axis[0].n_points;
  const int ny = grid.dim == 2 ? grid.axis[1].n_points : 1;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      const int64_t i = grid.index(ix, iy);
      if (grid.dim == 1)
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                      grid.axis[0].coord(ix), rho_mc[i], rho_psi[i]);
      else
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                      grid.axis[0].coord(ix), grid.axis[1].coord(iy), rho_mc[i],
                      rho_psi[i]);
      f << buf;
    }
}

void write_json(const std::string& path, const json& payload) {
  std::ofstream f(path);
  check_open(f, path);
  f << payload.dump(2) << "\n";
}

json read_config(const std::string& path,
                 const std::vector<std::string>& allowed_keys) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open config: " + path);
  json cfg;
  try {
    f >> cfg;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config parse: ") + e.what());
  }
  if (!cfg.is_object())
    throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  const int version = cfg.value("schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw Error(ErrorCode::ConfigError, "unsupported schema_version");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "schema_version") continue;
    bool known = false;
    for (const auto& k : allowed_keys)
      if (k == it.key()) {
        known = true;
        break;
      }
    if (!known)
      throw Error(ErrorCode::ConfigError, "unknown config key: " + it.key());
  }
  return cfg;
}

}  // namespace stomech::io
