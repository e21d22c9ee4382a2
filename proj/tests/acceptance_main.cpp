// Acceptance suite: eight numbered criteria, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qnm/scenarios.hpp"
#include "test_helpers.hpp"

using namespace qnm;
using namespace qnm_test;

namespace {

constexpr double kC = 2.99792458e8;

double omega_of_nm(double lambda_nm) {
  return 2.0 * std::numbers::pi * kC / (lambda_nm * 1e-9);
}

SpectralProfile markov_profile() {
  return SpectralProfile::single_gaussian(omega_of_nm(702.2), 2.0 * std::numbers::pi * 6.5e12);
}

SpectralProfile photonic_profile() {
  const double sigma = 2.0 * std::numbers::pi * 5.6e10;
  return SpectralProfile({{0.65, omega_of_nm(700.6), sigma}, {0.35, omega_of_nm(703.3), sigma}});
}

std::vector<double> linspace(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * k / (n - 1);
  return t;
}

double max_step_increase(const QuantifierSeries& s) {
  double worst = -1.0;
  for (std::size_t k = 1; k < s.values.size(); ++k)
    worst = std::max(worst, s.values[k] - s.values[k - 1]);
  return worst;
}

// every interval of a overlaps some interval of b, up to one grid step
bool intervals_overlap(const std::vector<Interval>& a, const std::vector<Interval>& b,
                       double slack) {
  if (a.empty() || b.empty()) return false;
  for (const Interval& x : a) {
    bool found = false;
    for (const Interval& y : b)
      if (std::min(x.t_end, y.t_end) - std::max(x.t_begin, y.t_begin) > -slack) found = true;
    if (!found) return false;
  }
  return true;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

const Exec kExec{0};  // all hardware threads; results are job-count independent

void criterion_1_soundness() {
  Timer timer;
  struct Case {
    std::string label;
    ChannelFamily family;
    double t_max;
  };
  std::vector<Case> cases;
  for (double alpha_deg : {0.0, 20.0, 45.0}) {
    const double axis_theta = 2.0 * alpha_deg * std::numbers::pi / 180.0;
    cases.push_back({"dephasing-alpha" + std::to_string(static_cast<int>(alpha_deg)),
                     DephasingFamily{markov_profile(), BlochAngle(axis_theta, 0.0), 1e-13}, 0.65});
  }
  cases.push_back({"damping-weak", AmplitudeDampingFamily{0.2, 1.0}, 20.0});
  cases.push_back({"mixing-flat", RandomUnitaryFamily{1.0, 0.0}, 3.0});

  const std::vector<BlochAngle> bases = {
      {0.0, 0.0},
      {std::numbers::pi / 8, 0.0},
      {std::numbers::pi / 4, 0.0},
      {3 * std::numbers::pi / 8, 0.0},
      {std::numbers::pi / 2, 0.0},
      {std::numbers::pi / 2, std::numbers::pi / 2},
      {std::numbers::pi / 4, std::numbers::pi / 3},
      {3 * std::numbers::pi / 8, 3 * std::numbers::pi / 2},
  };

  double worst = -1.0;
  std::string worst_label = "none";
  for (const Case& c : cases) {
    const auto grid = linspace(0.0, c.t_max, 200);
    const auto states = evolve_states(c.family, bell_phi_plus(), grid, kExec);
    for (const BlochAngle& basis : bases) {
      for (Quantifier q : {Quantifier::qi_rec, Quantifier::sic}) {
        QuantifierSpec spec;
        spec.kind = q;
        spec.basis_b = basis;
        const double inc = max_step_increase(trajectory_of_states(states, grid, spec, kExec));
        if (inc > worst) {
          worst = inc;
          worst_label = c.label + "/" + quantifier_name(q);
        }
      }
    }
  }
  const double elapsed = timer.seconds();
  char detail[160];
  std::snprintf(detail, sizeof detail, "max step increase %.3e at %s, limit 1e-7; %.1f s",
                worst, worst_label.c_str(), elapsed);
  report(1, "monotonicity on divisible families (qi_rec and sic, 8 bases, 200 points)",
         worst <= 1e-7 && elapsed < 120.0, detail);
}

void criterion_2_weaker_witnesses() {
  Timer timer;
  const DephasingFamily family{markov_profile(),
                               BlochAngle(40.0 * std::numbers::pi / 180.0, 0.0), 1e-13};
  const auto grid = linspace(0.0, 0.65, 200);
  const auto states = evolve_states(family, bell_phi_plus(), grid, kExec);

  QuantifierSpec qi;
  qi.kind = Quantifier::qi_rec;
  const double qi_increase = max_step_increase(trajectory_of_states(states, grid, qi, kExec));

  const QuantifierSeries local = local_trajectory(
      ChannelFamily{family}, DensityMatrix::pure({1.0, 0.0}), grid, BlochAngle(0.0, 0.0),
      Quantifier::rec_local_a, kExec);
  const double local_increase = positive_increase(local).integral;

  double best_extended = 0.0;
  for (int i = 0; i < 5; ++i) {
    QuantifierSpec ext;
    ext.kind = Quantifier::extended_rec;
    ext.basis_a = BlochAngle(0.0, 0.0);
    ext.basis_b = BlochAngle(i * std::numbers::pi / 8.0, 0.0);
    const QuantifierSeries s = trajectory_of_states(states, grid, ext, kExec);
    best_extended = std::max(best_extended, positive_increase(s).integral);
  }

  const bool pass = qi_increase <= 1e-7 && local_increase > 1e-3 && best_extended > 1e-3;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "qi_rec max step %.3e, local increase %.4f, extended increase %.4f; %.1f s",
                qi_increase, local_increase, best_extended, timer.seconds());
  report(2, "basis-dependent witnesses move while qi_rec stays monotone", pass, detail);
}

void criterion_3_closed_form() {
  Timer timer;
  const DephasingFamily family{photonic_profile(), BlochAngle(0.0, 0.0), 1e-13};
  const auto grid = linspace(0.0, 14.0, 200);
  const auto states = evolve_states(ChannelFamily{family}, bell_phi_plus(), grid, kExec);

  QuantifierSpec qi;
  qi.kind = Quantifier::qi_rec;
  const QuantifierSeries sq = trajectory_of_states(states, grid, qi, kExec);
  QuantifierSpec conc;
  conc.kind = Quantifier::concurrence;
  const QuantifierSeries sc = trajectory_of_states(states, grid, conc, kExec);

  double worst_qi = 0.0, worst_conc = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double mag = std::abs(kappa(family.profile, family.path_scale * grid[k]));
    worst_qi = std::max(worst_qi, std::abs(sq.values[k] - (1.0 - h2(0.5 * (1.0 + mag)))));
    worst_conc = std::max(worst_conc, std::abs(sc.values[k] - mag));
  }
  const double elapsed = timer.seconds();
  char detail[160];
  std::snprintf(detail, sizeof detail, "qi_rec err %.2e, concurrence err %.2e, limit 1e-8; %.1f s",
                worst_qi, worst_conc, elapsed);
  report(3, "dephased-Bell closed-form oracle over 200 points",
         worst_qi < 1e-8 && worst_conc < 1e-8 && elapsed < 5.0, detail);
}

void criterion_4_detection_agreement() {
  Timer timer;
  const ChannelFamily family =
      DephasingFamily{photonic_profile(), BlochAngle(0.0, 0.0), 1e-13};
  const auto grid = linspace(0.0, 14.0, 200);
  const double slack = grid[1] - grid[0];
  const auto states = evolve_states(family, bell_phi_plus(), grid, kExec);

  QuantifierSpec qi;
  qi.kind = Quantifier::qi_rec;
  QuantifierSpec sic_spec;
  sic_spec.kind = Quantifier::sic;
  QuantifierSpec conc;
  conc.kind = Quantifier::concurrence;

  std::vector<std::vector<Interval>> sets;
  sets.push_back(positive_increase(trajectory_of_states(states, grid, qi, kExec)).intervals);
  sets.push_back(positive_increase(trajectory_of_states(states, grid, sic_spec, kExec)).intervals);
  sets.push_back(positive_increase(trajectory_of_states(states, grid, conc, kExec)).intervals);
  const NonMarkovReport rhp_report = rhp(family, grid);
  sets.push_back(rhp_report.violation_intervals);

  bool overlap = true;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < sets.size(); ++j)
      if (i != j && !intervals_overlap(sets[i], sets[j], slack)) overlap = false;

  const auto bases = default_basis_grid();
  const NonMarkovReport nqi_report = n_qi(family, grid, bases, kExec);
  const auto pairs = default_blp_pairs();
  const NonMarkovReport blp_report = blp(family, grid, pairs, kExec);

  const double elapsed = timer.seconds();
  const bool pass = overlap && nqi_report.value > 0.0 && rhp_report.value > 0.0 &&
                    blp_report.value > 0.0 && elapsed < 120.0;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "intervals %s; N_QI %.4f, N_RHP %.4f, N_BLP %.4f; %.1f s",
                overlap ? "overlap" : "disagree", nqi_report.value, rhp_report.value,
                blp_report.value, elapsed);
  report(4, "revival intervals coincide and all measures fire on the doublet spectrum", pass,
         detail);
}

void criterion_5_sic_bound() {
  Timer timer;
  const std::vector<BlochAngle> bases = {
      {0.0, 0.0},
      {std::numbers::pi / 2, 0.0},
      {std::numbers::pi / 3, std::numbers::pi / 4},
      {2 * std::numbers::pi / 3, 3 * std::numbers::pi / 2},
  };
  Rng rng(20260809);
  double worst_gap = -1.0;
  long checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const DensityMatrix rho = random_density(rng, 4);
    for (const BlochAngle& angle : bases) {
      const OrthonormalBasis bob = OrthonormalBasis::from_bloch(angle);
      SicOptions opts;
      opts.jobs = 0;
      const double gap = sic(rho, bob, opts).value - qi_rec(rho, bob);
      worst_gap = std::max(worst_gap, gap);
      ++checked;
    }
  }
  // trajectory states of every registry scenario, reference direction z
  const OrthonormalBasis z = OrthonormalBasis::computational(2);
  for (const auto& [id, kv] : registry()) {
    const ScenarioConfig cfg = parse_scenario(kv);
    const auto grid = make_time_grid(cfg.grid);
    DensityMatrix init = builtin_state("bell:0.39269908169872414");
    if (cfg.initial_state.kind == InitialStateSpec::Kind::psi0_ab) init = psi0_ab_pure();
    const auto states = evolve_states(cfg.family, init, grid, kExec);
    for (const DensityMatrix& state : states) {
      SicOptions opts;
      opts.jobs = 0;
      const double gap = sic(state, z, opts).value - qi_rec(state, z);
      worst_gap = std::max(worst_gap, gap);
      ++checked;
    }
  }
  const double elapsed = timer.seconds();
  char detail[160];
  std::snprintf(detail, sizeof detail, "%ld evaluations, worst sic - qi_rec = %.3e; %.1f s",
                checked, worst_gap, elapsed);
  report(5, "steering-induced coherence never exceeds qi_rec", worst_gap <= 1e-6 && elapsed < 600.0,
         detail);
}

void criterion_6_master_equation() {
  Timer timer;
  double worst = 0.0;

  {
    const RandomUnitaryFamily fam{1.0, 0.0};
    const auto grid = linspace(0.0, 3.0, 61);
    const auto traj = integrate_master(schedule_for(fam), psi0_a_pure(), grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, trace_distance(traj[k], random_unitary_channel(
                                                           ru_weights(fam, grid[k]))
                                                           .apply(psi0_a_pure())));
  }
  {
    const RandomUnitaryFamily fam{1.0, 3.8};
    const auto grid = linspace(0.0, 12.0, 121);
    const auto traj = integrate_master(schedule_for(fam), psi0_a_pure(), grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, trace_distance(traj[k], random_unitary_channel(
                                                           ru_weights(fam, grid[k]))
                                                           .apply(psi0_a_pure())));
  }
  auto damping_oracle = [](const AmplitudeDampingFamily& fam, double t) {
    return amplitude_damping_channel(ad_G(fam, t)).apply(psi0_a_pure());
  };
  {
    const AmplitudeDampingFamily fam{0.2, 1.0};
    const auto grid = linspace(0.0, 20.0, 101);
    const auto traj = integrate_master(schedule_for(fam), psi0_a_pure(), grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, trace_distance(traj[k], damping_oracle(fam, grid[k])));
  }
  {
    // oscillatory regime: integrate each segment between decay zeros,
    // excluding three grid steps on both sides of every zero
    const AmplitudeDampingFamily fam{25.0, 1.0};
    const auto grid = linspace(0.0, 6.0, 201);
    const double dt = grid[1] - grid[0];
    const auto zeros = ad_G_zeros(fam, 6.0);
    std::vector<double> bounds = {0.0};
    bounds.insert(bounds.end(), zeros.begin(), zeros.end());
    bounds.push_back(6.0 + dt);
    for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
      std::vector<double> sub;
      for (double t : grid) {
        if (t <= bounds[seg] || t >= bounds[seg + 1]) continue;
        bool excluded = false;
        for (double z : zeros)
          if (std::abs(t - z) <= 3.0 * dt) excluded = true;
        if (!excluded) sub.push_back(t);
      }
      if (sub.size() < 2) continue;
      const DensityMatrix start = damping_oracle(fam, sub.front());
      const auto traj = integrate_master(schedule_for(fam), start, sub);
      for (std::size_t k = 0; k < sub.size(); ++k)
        worst = std::max(worst, trace_distance(traj[k], damping_oracle(fam, sub[k])));
    }
  }
  const double elapsed = timer.seconds();
  char detail[120];
  std::snprintf(detail, sizeof detail, "max trace distance %.3e, limit 1e-6; %.1f s", worst,
                elapsed);
  report(6, "integrator agrees with the analytic channels on both generators",
         worst < 1e-6 && elapsed < 60.0, detail);
}

void criterion_7_blp_closed_form() {
  Timer timer;
  const ChannelFamily family =
      DephasingFamily{photonic_profile(), BlochAngle(0.0, 0.0), 1e-13};
  const auto grid = linspace(0.0, 14.0, 200);
  const double r = 1.0 / std::sqrt(2.0);
  const QuantifierSeries s = trace_distance_series(family, DensityMatrix::pure({r, r}),
                                                   DensityMatrix::pure({r, -r}), grid, kExec);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    worst = std::max(worst,
                     std::abs(s.values[k] - std::abs(kappa(photonic_profile(), 1e-13 * grid[k]))));
  char detail[120];
  std::snprintf(detail, sizeof detail, "max |distance - |kappa|| = %.3e, limit 1e-9; %.1f s",
                worst, timer.seconds());
  report(7, "antipodal-pair distinguishability equals the decoherence factor", worst < 1e-9,
         detail);
}

void criterion_8_determinism() {
  Timer timer;
  bool all_identical = true;
  std::string first_mismatch;
  for (const auto& [id, kv] : registry()) {
    const ScenarioConfig cfg = parse_scenario(kv);
    std::ostringstream a, b;
    export_csv(run_scenario(cfg, kExec), a);
    export_csv(run_scenario(cfg, kExec), b);
    if (a.str() != b.str()) {
      all_identical = false;
      if (first_mismatch.empty()) first_mismatch = id;
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "%s; %.1f s",
                all_identical ? "all registry scenarios byte-identical"
                              : ("mismatch in " + first_mismatch).c_str(),
                timer.seconds());
  report(8, "repeated runs produce byte-identical csv", all_identical, detail);
}

}  // namespace

int main() {
  criterion_1_soundness();
  criterion_2_weaker_witnesses();
  criterion_3_closed_form();
  criterion_4_detection_agreement();
  criterion_5_sic_bound();
  criterion_6_master_equation();
  criterion_7_blp_closed_form();
  criterion_8_determinism();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
