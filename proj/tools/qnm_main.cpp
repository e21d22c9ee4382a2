#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnm/scenarios.hpp"

namespace {

using namespace qnm;

std::string format_intervals(const std::vector<Interval>& intervals) {
  if (intervals.empty()) return "-";
  std::string out;
  char buf[64];
  for (const Interval& iv : intervals) {
    std::snprintf(buf, sizeof buf, "[%.6f,%.6f]", iv.t_begin, iv.t_end);
    if (!out.empty()) out += ' ';
    out += buf;
  }
  return out;
}

void print_reports(const std::vector<NonMarkovReport>& reports) {
  std::printf("%-14s %-34s %-10s %-4s %s\n", "measure", "subject", "value", "flag", "intervals");
  for (const NonMarkovReport& r : reports) {
    const char* name = "";
    switch (r.measure) {
      case Measure::n_qi: name = "N_QI"; break;
      case Measure::blp: name = "N_BLP"; break;
      case Measure::rhp: name = "N_RHP"; break;
      case Measure::monotonicity_witness: name = "monotonicity"; break;
    }
    std::printf("%-14s %-34s %-10.6f %-4s %s\n", name, r.subject.c_str(), r.value,
                r.non_markovian ? "yes" : "no", format_intervals(r.violation_intervals).c_str());
  }
}

struct CommonArgs {
  std::string scenario;
  std::string config_path;
  std::vector<std::string> sets;
  int grid_points = 0;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("scenario", args.scenario, "registry scenario id");
  cmd->add_option("--config", args.config_path, "configuration file (flat key = value)");
  cmd->add_option("--set", args.sets, "key=value override, repeatable");
  cmd->add_option("--grid", args.grid_points, "override time_grid.n_points");
  cmd->add_option("--jobs", args.jobs, "parallel task cap (0 = all hardware threads)");
}

ScenarioConfig build_config(const CommonArgs& args) {
  KvMap kv;
  if (!args.scenario.empty()) {
    const auto& reg = registry();
    const auto it = reg.find(args.scenario);
    if (it == reg.end()) throw ConfigError("unknown scenario '" + args.scenario + "'");
    kv = it->second;
  } else if (!args.config_path.empty()) {
    kv = read_config_file(args.config_path);
  } else {
    throw ConfigError("give a scenario id or --config FILE");
  }
  for (const std::string& s : args.sets) apply_override(kv, s);
  if (args.grid_points > 0)
    apply_override(kv, "time_grid.n_points=" + std::to_string(args.grid_points));
  return parse_scenario(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open-qubit dynamics, coherence quantifiers and non-Markovianity witnesses"};
  app.require_subcommand(1);

  CommonArgs run_args, measures_args, check_args;
  std::string out_dir, format;

  CLI::App* cmd_run = app.add_subcommand("run", "run a scenario and export its series");
  add_common(cmd_run, run_args);
  cmd_run->add_option("--out", out_dir, "output directory");
  cmd_run->add_option("--format", format, "csv | json | both")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  app.add_subcommand("list", "print the registry scenario ids");

  CLI::App* cmd_measures =
      app.add_subcommand("measures", "compute the N_QI, N_BLP and N_RHP measures");
  add_common(cmd_measures, measures_args);

  CLI::App* cmd_check =
      app.add_subcommand("check-divisibility", "check CP divisibility on the scenario grid");
  add_common(cmd_check, check_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& [id, kv] : qnm::registry()) {
        (void)kv;
        std::printf("%s\n", id.c_str());
      }
      return 0;
    }

    if (app.got_subcommand(cmd_run)) {
      ScenarioConfig cfg = build_config(run_args);
      if (!out_dir.empty()) cfg.output_path = out_dir;
      if (!format.empty()) cfg.format = format;
      const ScenarioResult result = run_scenario(cfg, Exec{run_args.jobs});
      for (const std::string& path : qnm::export_to_files(result))
        std::printf("wrote %s\n", path.c_str());
      print_reports(result.reports);
      return 0;
    }

    if (app.got_subcommand(cmd_measures)) {
      const ScenarioConfig cfg = build_config(measures_args);
      const std::vector<double> tgrid = make_time_grid(cfg.grid);
      const Exec exec{measures_args.jobs};
      std::vector<NonMarkovReport> reports;
      const std::vector<BlochAngle> grid = default_basis_grid();
      reports.push_back(n_qi(cfg.family, tgrid, grid, exec));
      const auto pairs = default_blp_pairs();
      reports.push_back(blp(cfg.family, tgrid, pairs, exec));
      reports.push_back(rhp(cfg.family, tgrid));
      for (NonMarkovReport& r : reports) r.subject = cfg.scenario_id;
      print_reports(reports);
      return 0;
    }

    if (app.got_subcommand(cmd_check)) {
      const ScenarioConfig cfg = build_config(check_args);
      const std::vector<double> tgrid = make_time_grid(cfg.grid);
      const DivisibilityReport report = is_cp_divisible(cfg.family, tgrid);
      if (report.cp_divisible) {
        std::printf("CP-divisible: yes\n");
      } else {
        std::printf("CP-divisible: no, first violation t=%.6f\n",
                    *report.first_violation_time);
      }
      return 0;
    }
  } catch (const qnm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qnm::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
