#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qnm/witness.hpp"

namespace qnm {

inline constexpr const char* kVersion = "1.0.0";

/// Flat key=value configuration, also kept verbatim for provenance echo.
using KvMap = std::map<std::string, std::string>;

struct TimeGrid {
  double t_max = 1.0;
  int n_points = 200;
};

struct InitialStateSpec {
  enum class Kind { bell, psi0_a, psi0_ab, ket0, custom };
  Kind kind = Kind::bell;
  double bell_theta = 0.0;
  ComplexMatrix custom;  // used when kind == custom (dim 2 or 4)
};

struct ScenarioConfig {
  std::string scenario_id;
  ChannelFamily family = RandomUnitaryFamily{1.0, 0.0};
  InitialStateSpec initial_state;
  bool has_local_state = false;
  InitialStateSpec local_state;  // single-qubit input for the local-A series
  TimeGrid grid;
  std::vector<BlochAngle> bases;
  std::vector<Quantifier> quantifiers;
  double fidelity = 1.0;
  std::string output_path = "out";
  std::string format = "csv";
  KvMap kv;  // raw configuration for provenance
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<QuantifierSeries> series;
  std::vector<NonMarkovReport> reports;
  std::string version;
  std::string timestamp;
};

/// Named built-in pure states: "bell:<theta>" (cos(2 theta)|00> +
/// sin(2 theta)|11>), "psi0_A", "psi0_AB", "ket0".
DensityMatrix builtin_state(const std::string& which);

DensityMatrix bell_pure(double theta);
DensityMatrix psi0_a_pure();
DensityMatrix psi0_ab_pure();

/// Uniform grid over [0, t_max] with n points (first point at 0).
std::vector<double> make_time_grid(const TimeGrid& grid);

/// Built-in scenario configurations, keyed by id.
const std::map<std::string, KvMap>& registry();

/// Parse a key=value map into a full configuration. Unknown keys and
/// malformed values raise ConfigError.
ScenarioConfig parse_scenario(const KvMap& kv);

/// Read a flat key=value file (# starts a comment).
KvMap read_config_file(const std::string& path);

/// Apply one "key=value" override.
void apply_override(KvMap& kv, const std::string& assignment);

/// Run all requested (quantifier, basis) series plus the non-Markovianity
/// reports. Deterministic for a fixed configuration.
ScenarioResult run_scenario(const ScenarioConfig& config, Exec exec = {});

/// CSV with columns: scenario_id, quantifier, basis_theta, basis_phi, t,
/// value. UTF-8, LF line endings, 12 significant digits.
void export_csv(const ScenarioResult& result, std::ostream& os);

/// JSON mirror of the result (config echo, series, reports, provenance).
void export_json(const ScenarioResult& result, std::ostream& os);

/// Write result files under result.config.output_path; returns the paths.
std::vector<std::string> export_to_files(const ScenarioResult& result);

}  // namespace qnm
