#include "qnm/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace qnm {

namespace {

constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + s + "' for " + key);
  }
}

int parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + s + "' for " + key);
  }
}

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string iso_timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

InitialStateSpec parse_state_spec(const std::string& value, const std::string& key) {
  InitialStateSpec spec;
  if (value.rfind("bell", 0) == 0) {
    spec.kind = InitialStateSpec::Kind::bell;
    const auto parts = split(value, ':');
    spec.bell_theta =
        parts.size() > 1 ? parse_double(parts[1], key) : std::numbers::pi / 8.0;
    return spec;
  }
  if (value == "psi0_A") {
    spec.kind = InitialStateSpec::Kind::psi0_a;
    return spec;
  }
  if (value == "psi0_AB") {
    spec.kind = InitialStateSpec::Kind::psi0_ab;
    return spec;
  }
  if (value == "ket0") {
    spec.kind = InitialStateSpec::Kind::ket0;
    return spec;
  }
  if (value.rfind("custom", 0) == 0) {
    // custom:<dim>:re,im,re,im,...   row-major density matrix
    const auto parts = split(value, ':');
    if (parts.size() != 3) throw ConfigError(key + ": custom state needs custom:<dim>:<numbers>");
    const int dim = parse_int(parts[1], key);
    if (dim != 2 && dim != 4) throw ConfigError(key + ": custom dim must be 2 or 4");
    const auto numbers = split(parts[2], ',');
    if (static_cast<int>(numbers.size()) != 2 * dim * dim)
      throw ConfigError(key + ": custom state needs " + std::to_string(2 * dim * dim) +
                        " numbers");
    ComplexMatrix m(dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        m(r, c) = cx(parse_double(numbers[2 * (r * dim + c)], key),
                     parse_double(numbers[2 * (r * dim + c) + 1], key));
    spec.kind = InitialStateSpec::Kind::custom;
    spec.custom = m;
    return spec;
  }
  throw ConfigError(key + ": unknown state '" + value + "'");
}

DensityMatrix realize_state(const InitialStateSpec& spec, double fidelity) {
  DensityMatrix rho = [&] {
    switch (spec.kind) {
      case InitialStateSpec::Kind::bell: return bell_pure(spec.bell_theta);
      case InitialStateSpec::Kind::psi0_a: return psi0_a_pure();
      case InitialStateSpec::Kind::psi0_ab: return psi0_ab_pure();
      case InitialStateSpec::Kind::ket0: return DensityMatrix::pure({1.0, 0.0});
      case InitialStateSpec::Kind::custom: return DensityMatrix::from_matrix(spec.custom);
    }
    throw ConfigError("unreachable state kind");
  }();
  if (fidelity >= 1.0) return rho;
  ComplexMatrix mixed = rho.mat();
  mixed *= cx(fidelity, 0.0);
  ComplexMatrix white = ComplexMatrix::identity(rho.dim());
  white *= cx((1.0 - fidelity) / rho.dim(), 0.0);
  return DensityMatrix::from_matrix(mixed + white);
}

std::string angle_label(const BlochAngle& a) {
  std::ostringstream os;
  os << "(" << fmt12(a.theta) << "," << fmt12(a.phi) << ")";
  return os.str();
}

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::n_qi: return "N_QI";
    case Measure::blp: return "N_BLP";
    case Measure::rhp: return "N_RHP";
    case Measure::monotonicity_witness: return "monotonicity";
  }
  return "unknown";
}

const BlochAngle& csv_angle(const QuantifierSeries& s) {
  return s.name == Quantifier::rec_local_a ? s.basis_a : s.basis_b;
}

}  // namespace

DensityMatrix bell_pure(double theta) {
  return DensityMatrix::pure({std::cos(2.0 * theta), 0.0, 0.0, std::sin(2.0 * theta)});
}

DensityMatrix psi0_a_pure() { return DensityMatrix::pure({std::sqrt(3.0) / 2.0, 0.5}); }

DensityMatrix psi0_ab_pure() {
  const double s6 = std::sqrt(6.0) / 4.0;
  const double s2 = std::sqrt(2.0) / 4.0;
  return DensityMatrix::pure({s6, s2, s2, s6});
}

DensityMatrix builtin_state(const std::string& which) {
  return realize_state(parse_state_spec(which, "builtin_state"), 1.0);
}

std::vector<double> make_time_grid(const TimeGrid& grid) {
  if (grid.n_points < 2) throw ConfigError("time_grid.n_points must be at least 2");
  if (!(grid.t_max > 0.0)) throw ConfigError("time_grid.t_max must be positive");
  std::vector<double> t(grid.n_points);
  for (int k = 0; k < grid.n_points; ++k)
    t[k] = grid.t_max * static_cast<double>(k) / (grid.n_points - 1);
  return t;
}

const std::map<std::string, KvMap>& registry() {
  static const std::map<std::string, KvMap> reg = [] {
    const std::string xz_family =
        "0:0,0.39269908169872414:0,0.7853981633974483:0,1.1780972450961724:0,"
        "1.5707963267948966:0";
    const std::string bell = "bell:0.39269908169872414";
    std::map<std::string, KvMap> r;
    r["markov-dephasing-main"] = {
        {"scenario_id", "markov-dephasing-main"},
        {"family.kind", "dephasing"},
        {"family.alpha_deg", "20"},
        {"family.path_scale", "1e-13"},
        {"family.spectrum", "1:702.2:6.5e12"},
        {"initial_state", bell},
        {"local_state", "ket0"},
        {"time_grid.t_max", "0.65"},
        {"time_grid.n_points", "200"},
        {"bases", xz_family},
        {"quantifiers", "qi_rec,extended_rec,rec_local_A,concurrence"},
    };
    r["photonic-nonmarkov"] = {
        {"scenario_id", "photonic-nonmarkov"},
        {"family.kind", "dephasing"},
        {"family.alpha_deg", "0"},
        {"family.path_scale", "1e-13"},
        // etalon doublet: free spectral range ~2.5 THz, peak width from the
        // mirror reflectivity
        {"family.spectrum", "0.65:700.6:5.6e10,0.35:703.3:5.6e10"},
        {"initial_state", bell},
        {"time_grid.t_max", "14"},
        {"time_grid.n_points", "200"},
        {"bases", "0:0,0.39269908169872414:0,0.7853981633974483:0,1.1780972450961724:0"},
        {"quantifiers", "qi_rec,sic,concurrence,rec_local_B"},
    };
    r["markov-ad-fig-a1"] = {
        {"scenario_id", "markov-ad-fig-a1"},
        {"family.kind", "amplitude-damping"},
        {"family.gamma0", "0.2"},
        {"family.lambda", "1"},
        {"initial_state", "psi0_AB"},
        {"local_state", "psi0_A"},
        {"time_grid.t_max", "20"},
        {"time_grid.n_points", "200"},
        {"bases", xz_family},
        {"quantifiers", "qi_rec,extended_rec,rec_local_A"},
    };
    r["nonmarkov-ad-fig-a12"] = {
        {"scenario_id", "nonmarkov-ad-fig-a12"},
        {"family.kind", "amplitude-damping"},
        {"family.gamma0", "25"},
        {"family.lambda", "1"},
        {"initial_state", "psi0_AB"},
        {"time_grid.t_max", "6"},
        {"time_grid.n_points", "200"},
        {"bases", xz_family},
        {"quantifiers", "qi_rec,sic"},
    };
    r["markov-ru-fig-a2"] = {
        {"scenario_id", "markov-ru-fig-a2"},
        {"family.kind", "random-unitary"},
        {"family.c", "1"},
        {"family.lambda_nm", "0"},
        {"initial_state", "psi0_AB"},
        {"local_state", "psi0_A"},
        {"time_grid.t_max", "3"},
        {"time_grid.n_points", "200"},
        {"bases", xz_family},
        {"quantifiers", "qi_rec,extended_rec,rec_local_A"},
    };
    r["nonmarkov-ru-fig-a22"] = {
        {"scenario_id", "nonmarkov-ru-fig-a22"},
        {"family.kind", "random-unitary"},
        {"family.c", "1"},
        {"family.lambda_nm", "3.8"},
        {"initial_state", "psi0_AB"},
        {"time_grid.t_max", "12.5"},
        {"time_grid.n_points", "200"},
        {"bases", xz_family},
        {"quantifiers", "qi_rec,sic"},
    };
    return r;
  }();
  return reg;
}

ScenarioConfig parse_scenario(const KvMap& kv) {
  static const std::vector<std::string> known = {
      "scenario_id",    "family.kind",       "family.alpha_deg", "family.axis_theta",
      "family.axis_phi", "family.path_scale", "family.spectrum",  "family.gamma0",
      "family.lambda",  "family.c",          "family.lambda_nm", "initial_state",
      "local_state",    "time_grid.t_max",   "time_grid.n_points", "bases",
      "quantifiers",    "fidelity",          "output.path",      "output.format"};
  for (const auto& [key, value] : kv) {
    (void)value;
    bool ok = false;
    for (const std::string& k : known) ok = ok || k == key;
    if (!ok) throw ConfigError("unknown configuration key '" + key + "'");
  }

  auto get = [&kv](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const std::string* v = get(key);
    if (!v) throw ConfigError("missing configuration key '" + key + "'");
    return *v;
  };

  ScenarioConfig cfg;
  cfg.kv = kv;
  cfg.scenario_id = get("scenario_id") ? *get("scenario_id") : "custom";

  const std::string& kind = require("family.kind");
  if (kind == "dephasing") {
    std::vector<SpectralComponent> comps;
    for (const std::string& entry : split(require("family.spectrum"), ',')) {
      const auto f = split(entry, ':');
      if (f.size() != 3)
        throw ConfigError("family.spectrum entries must be weight:center_nm:sigma_hz");
      const double weight = parse_double(f[0], "family.spectrum");
      const double lambda_nm = parse_double(f[1], "family.spectrum");
      const double sigma_hz = parse_double(f[2], "family.spectrum");
      comps.push_back({weight, 2.0 * std::numbers::pi * kSpeedOfLight / (lambda_nm * 1e-9),
                       2.0 * std::numbers::pi * sigma_hz});
    }
    DephasingFamily fam{SpectralProfile(std::move(comps)), BlochAngle(0.0, 0.0), 1.0};
    if (get("family.alpha_deg")) {
      const double alpha =
          parse_double(*get("family.alpha_deg"), "family.alpha_deg") * std::numbers::pi / 180.0;
      fam.axis = BlochAngle(2.0 * alpha, 0.0);
    } else if (get("family.axis_theta")) {
      fam.axis = BlochAngle(parse_double(*get("family.axis_theta"), "family.axis_theta"),
                            get("family.axis_phi")
                                ? parse_double(*get("family.axis_phi"), "family.axis_phi")
                                : 0.0);
    }
    if (get("family.path_scale"))
      fam.path_scale = parse_double(*get("family.path_scale"), "family.path_scale");
    cfg.family = std::move(fam);
  } else if (kind == "amplitude-damping") {
    cfg.family = AmplitudeDampingFamily{parse_double(require("family.gamma0"), "family.gamma0"),
                                        parse_double(require("family.lambda"), "family.lambda")};
  } else if (kind == "random-unitary") {
    RandomUnitaryFamily fam{parse_double(require("family.c"), "family.c"), 0.0};
    if (get("family.lambda_nm"))
      fam.lambda_nm = parse_double(*get("family.lambda_nm"), "family.lambda_nm");
    cfg.family = fam;
  } else {
    throw ConfigError("family.kind must be dephasing, amplitude-damping or random-unitary");
  }

  cfg.initial_state = parse_state_spec(require("initial_state"), "initial_state");
  if (get("local_state") && *get("local_state") != "none") {
    cfg.has_local_state = true;
    cfg.local_state = parse_state_spec(*get("local_state"), "local_state");
  }

  cfg.grid.t_max = parse_double(require("time_grid.t_max"), "time_grid.t_max");
  cfg.grid.n_points = parse_int(require("time_grid.n_points"), "time_grid.n_points");

  if (get("bases")) {
    for (const std::string& entry : split(*get("bases"), ',')) {
      const auto f = split(entry, ':');
      if (f.size() != 2) throw ConfigError("bases entries must be theta:phi (radians)");
      cfg.bases.emplace_back(parse_double(f[0], "bases"), parse_double(f[1], "bases"));
    }
  }
  if (cfg.bases.empty()) cfg.bases.emplace_back(0.0, 0.0);

  if (get("quantifiers")) {
    for (const std::string& name : split(*get("quantifiers"), ',')) {
      if (name.empty()) continue;
      const auto q = quantifier_from_name(name);
      if (!q) throw ConfigError("unknown quantifier '" + name + "'");
      if (*q == Quantifier::trace_distance_pair)
        throw ConfigError("trace_distance_pair is reported through the BLP measure, "
                          "not as a scenario series");
      cfg.quantifiers.push_back(*q);
    }
  }

  if (get("fidelity")) {
    cfg.fidelity = parse_double(*get("fidelity"), "fidelity");
    if (cfg.fidelity <= 0.0 || cfg.fidelity > 1.0)
      throw ConfigError("fidelity must be in (0, 1]");
  }
  if (get("output.path")) cfg.output_path = *get("output.path");
  if (get("output.format")) {
    cfg.format = *get("output.format");
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
      throw ConfigError("output.format must be csv, json or both");
  }
  return cfg;
}

KvMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  KvMap kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_override(KvMap& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like key=value");
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, Exec exec) {
  const std::vector<double> tgrid = make_time_grid(cfg.grid);

  ScenarioResult result;
  result.config = cfg;
  result.version = kVersion;

  const DensityMatrix initial = realize_state(cfg.initial_state, cfg.fidelity);

  std::vector<DensityMatrix> bipartite;
  auto bipartite_states = [&]() -> const std::vector<DensityMatrix>& {
    if (bipartite.empty()) {
      if (initial.dim() != 4)
        throw ConfigError("scenario '" + cfg.scenario_id +
                          "' requests a two-qubit quantifier but the initial state is a qubit");
      bipartite = evolve_states(cfg.family, initial, tgrid, exec);
    }
    return bipartite;
  };

  for (Quantifier q : cfg.quantifiers) {
    if (q == Quantifier::concurrence) {
      QuantifierSpec spec;
      spec.kind = q;
      result.series.push_back(trajectory_of_states(bipartite_states(), tgrid, spec, exec));
      continue;
    }
    for (const BlochAngle& basis : cfg.bases) {
      if (q == Quantifier::rec_local_a) {
        if (initial.dim() == 2) {
          result.series.push_back(
              local_trajectory(cfg.family, initial, tgrid, basis, Quantifier::rec_local_a, exec));
        } else if (cfg.has_local_state) {
          const DensityMatrix local = realize_state(cfg.local_state, cfg.fidelity);
          if (local.dim() != 2) throw ConfigError("local_state must be a qubit state");
          result.series.push_back(
              local_trajectory(cfg.family, local, tgrid, basis, Quantifier::rec_local_a, exec));
        } else {
          QuantifierSpec spec;
          spec.kind = q;
          spec.basis_a = basis;
          result.series.push_back(trajectory_of_states(bipartite_states(), tgrid, spec, exec));
        }
        continue;
      }
      QuantifierSpec spec;
      spec.kind = q;
      spec.basis_b = basis;
      if (q == Quantifier::extended_rec) spec.basis_a = BlochAngle(0.0, 0.0);
      result.series.push_back(trajectory_of_states(bipartite_states(), tgrid, spec, exec));
    }
  }

  // per-series monotonicity witnesses for the sound quantifiers
  for (const QuantifierSeries& s : result.series) {
    if (s.name != Quantifier::qi_rec && s.name != Quantifier::sic) continue;
    NonMarkovReport r = monotonicity_witness(s);
    r.subject = quantifier_name(s.name) + "@" + angle_label(csv_angle(s));
    result.reports.push_back(std::move(r));
  }

  // family-level measures
  {
    const std::vector<BlochAngle> grid = default_basis_grid();
    NonMarkovReport r = n_qi(cfg.family, tgrid, grid, exec);
    r.subject = "family";
    result.reports.push_back(std::move(r));
  }
  {
    const auto pairs = default_blp_pairs();
    NonMarkovReport r = blp(cfg.family, tgrid, pairs, exec);
    r.subject = "family";
    result.reports.push_back(std::move(r));
  }
  {
    NonMarkovReport r = rhp(cfg.family, tgrid);
    r.subject = "family";
    result.reports.push_back(std::move(r));
  }

  result.timestamp = iso_timestamp_utc();
  return result;
}

void export_csv(const ScenarioResult& result, std::ostream& os) {
  os << "scenario_id,quantifier,basis_theta,basis_phi,t,value\n";
  for (const QuantifierSeries& s : result.series) {
    const std::string theta = s.has_basis ? fmt12(csv_angle(s).theta) : "";
    const std::string phi = s.has_basis ? fmt12(csv_angle(s).phi) : "";
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      os << result.config.scenario_id << ',' << quantifier_name(s.name) << ',' << theta << ','
         << phi << ',' << fmt12(s.times[k]) << ',' << fmt12(s.values[k]) << '\n';
    }
  }
}

void export_json(const ScenarioResult& result, std::ostream& os) {
  nlohmann::json j;
  j["config"] = result.config.kv;
  j["provenance"] = {{"version", result.version}, {"timestamp", result.timestamp}};

  j["series"] = nlohmann::json::array();
  for (const QuantifierSeries& s : result.series) {
    nlohmann::json js;
    js["quantifier"] = quantifier_name(s.name);
    if (s.has_basis) {
      js["basis_theta"] = csv_angle(s).theta;
      js["basis_phi"] = csv_angle(s).phi;
    }
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t k = 0; k < s.times.size(); ++k)
      samples.push_back({s.times[k], s.values[k]});
    js["samples"] = std::move(samples);
    j["series"].push_back(std::move(js));
  }

  j["reports"] = nlohmann::json::array();
  for (const NonMarkovReport& r : result.reports) {
    nlohmann::json jr;
    jr["measure"] = measure_name(r.measure);
    jr["subject"] = r.subject;
    jr["value"] = r.value;
    jr["non_markovian"] = r.non_markovian;
    if (r.argmax_basis)
      jr["argmax_basis"] = {{"theta", r.argmax_basis->theta}, {"phi", r.argmax_basis->phi}};
    if (r.argmax_pair) jr["argmax_pair"] = *r.argmax_pair;
    nlohmann::json intervals = nlohmann::json::array();
    for (const Interval& iv : r.violation_intervals) intervals.push_back({iv.t_begin, iv.t_end});
    jr["violation_intervals"] = std::move(intervals);
    j["reports"].push_back(std::move(jr));
  }
  os << j.dump(2) << '\n';
}

std::vector<std::string> export_to_files(const ScenarioResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(result.config.output_path);
  fs::create_directories(dir);
  std::vector<std::string> written;
  const bool csv = result.config.format == "csv" || result.config.format == "both";
  const bool json = result.config.format == "json" || result.config.format == "both";
  if (csv) {
    const fs::path path = dir / (result.config.scenario_id + ".csv");
    std::ofstream os(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!os) throw ConfigError("cannot write " + path.string());
    export_csv(result, os);
    written.push_back(path.string());
  }
  if (json) {
    const fs::path path = dir / (result.config.scenario_id + ".json");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    export_json(result, os);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace qnm
