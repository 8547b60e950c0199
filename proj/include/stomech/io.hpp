#pragma once

#include <string>

#include <json.hpp>

#include "stomech/core.hpp"
#include "stomech/correspond.hpp"
#include "stomech/noise.hpp"
#include "stomech/pde.hpp"

namespace stomech::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

json spec_to_json(const DiffusionSpec& spec);
DiffusionSpec spec_from_json(const json& j);
json time_grid_to_json(const TimeGrid& g);
TimeGrid time_grid_from_json(const json& j);
json space_grid_to_json(const SpaceGrid& g);
SpaceGrid space_grid_from_json(const json& j);

// Common metadata header carried by every output file: spec, grids, seed,
// schema version, tool version and a timestamp (the one field exempted from
// byte determinism).
json make_metadata(const json& spec, const json& extra, uint64_t seed);

// One metadata record, then one JSON record per path:
// {"path": k, "m": [[re, im], ...]} flattened step-major.
void write_ensemble_ndjson(const std::string& path,
                           const noise::ComplexPathEnsemble& ens,
                           const json& metadata);

// Realized-QV series: columns t, a, b, conj, re, im.
void write_qv_csv(const std::string& path,
                  const std::vector<noise::RealizedQV>& qvs,
                  const TimeGrid& grid, const json& metadata);

// Wave field: columns t, x[, y], re_psi, im_psi.
void write_field_csv(const std::string& path, const pde::WaveField& field,
                     const json& metadata);

// Norm trace: columns t, l2_norm.
void write_norm_trace_csv(const std::string& path, const pde::WaveField& field,
                          const json& metadata);

// Density comparison: columns x[, y], rho_mc, rho_psi.
void write_density_comparison_csv(const std::string& path,
                                  const SpaceGrid& grid,
                                  const std::vector<double>& rho_mc,
                                  const std::vector<double>& rho_psi,
                                  const json& metadata);

void write_json(const std::string& path, const json& payload);

// Parses a config file, checking the schema version and rejecting unknown
// keys. Throws ConfigError.
json read_config(const std::string& path,
                 const std::vector<std::string>& allowed_keys);

}  // namespace stomech::io
