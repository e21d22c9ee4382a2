#include "qnm/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qnm/detail/nelder_mead.hpp"
#include "qnm/parallel.hpp"

namespace qnm {

namespace {

constexpr double kWitnessThreshold = 1e-7;  // per-step increase that counts as a violation
constexpr double kRhpStepFloor = 1e-11;     // trace-norm excess below this is eigen-solver noise

void check_grid(std::span<const double> tgrid) {
  if (tgrid.size() < 2) throw NumericalError("time grid needs at least two points");
  if (tgrid.front() < 0.0) throw NumericalError("time grid must start at t >= 0");
  for (std::size_t k = 1; k < tgrid.size(); ++k)
    if (!(tgrid[k] > tgrid[k - 1])) throw NumericalError("time grid must be strictly increasing");
}

DensityMatrix bell_state() {
  const double r = 1.0 / std::sqrt(2.0);
  return DensityMatrix::pure({r, 0.0, 0.0, r});
}

}  // namespace

std::string quantifier_name(Quantifier q) {
  switch (q) {
    case Quantifier::qi_rec: return "qi_rec";
    case Quantifier::sic: return "sic";
    case Quantifier::rec_local_a: return "rec_local_A";
    case Quantifier::rec_local_b: return "rec_local_B";
    case Quantifier::extended_rec: return "extended_rec";
    case Quantifier::concurrence: return "concurrence";
    case Quantifier::trace_distance_pair: return "trace_distance_pair";
  }
  return "unknown";
}

std::optional<Quantifier> quantifier_from_name(const std::string& name) {
  for (Quantifier q : {Quantifier::qi_rec, Quantifier::sic, Quantifier::rec_local_a,
                       Quantifier::rec_local_b, Quantifier::extended_rec, Quantifier::concurrence,
                       Quantifier::trace_distance_pair})
    if (quantifier_name(q) == name) return q;
  return std::nullopt;
}

std::vector<DensityMatrix> evolve_states(const ChannelFamily& family, const DensityMatrix& rho0_ab,
                                         std::span<const double> tgrid, Exec exec) {
  check_grid(tgrid);
  if (rho0_ab.dim() != 4) throw NumericalError("evolve_states: need a two-qubit initial state");
  std::vector<DensityMatrix> out(tgrid.size(), rho0_ab);
  par::map_indices(static_cast<int>(tgrid.size()), exec.jobs, [&](int k) {
    out[k] = apply_local_a(channel_at(family, tgrid[k]), rho0_ab);
  });
  return out;
}

std::vector<DensityMatrix> evolve_states_local(const ChannelFamily& family,
                                               const DensityMatrix& rho0,
                                               std::span<const double> tgrid, Exec exec) {
  check_grid(tgrid);
  if (rho0.dim() != 2) throw NumericalError("evolve_states_local: need a qubit initial state");
  std::vector<DensityMatrix> out(tgrid.size(), rho0);
  par::map_indices(static_cast<int>(tgrid.size()), exec.jobs, [&](int k) {
    out[k] = channel_at(family, tgrid[k]).apply(rho0);
  });
  return out;
}

QuantifierSeries trajectory_of_states(const std::vector<DensityMatrix>& states,
                                      std::span<const double> tgrid, const QuantifierSpec& spec,
                                      Exec exec) {
  if (states.size() != tgrid.size())
    throw NumericalError("trajectory_of_states: state/grid size mismatch");

  QuantifierSeries series;
  series.name = spec.kind;
  series.basis_a = spec.basis_a;
  series.basis_b = spec.basis_b;
  series.has_basis = spec.kind != Quantifier::concurrence;
  series.times.assign(tgrid.begin(), tgrid.end());
  series.values.assign(tgrid.size(), 0.0);

  switch (spec.kind) {
    case Quantifier::qi_rec: {
      const OrthonormalBasis bob = OrthonormalBasis::from_bloch(spec.basis_b);
      par::map_indices(static_cast<int>(states.size()), exec.jobs,
                       [&](int k) { series.values[k] = qi_rec(states[k], bob); });
      break;
    }
    case Quantifier::sic: {
      const OrthonormalBasis bob = OrthonormalBasis::from_bloch(spec.basis_b);
      // parallelize over time, keep each optimizer serial
      SicOptions opts = spec.sic_options;
      opts.jobs = 1;
      par::map_indices(static_cast<int>(states.size()), exec.jobs,
                       [&](int k) { series.values[k] = sic(states[k], bob, opts).value; });
      break;
    }
    case Quantifier::rec_local_a: {
      const OrthonormalBasis basis = OrthonormalBasis::from_bloch(spec.basis_a);
      par::map_indices(static_cast<int>(states.size()), exec.jobs, [&](int k) {
        series.values[k] = rec(partial_trace(states[k], Keep::A), basis);
      });
      break;
    }
    case Quantifier::rec_local_b: {
      const OrthonormalBasis basis = OrthonormalBasis::from_bloch(spec.basis_b);
      par::map_indices(static_cast<int>(states.size()), exec.jobs, [&](int k) {
        series.values[k] = rec(partial_trace(states[k], Keep::B), basis);
      });
      break;
    }
    case Quantifier::extended_rec: {
      const OrthonormalBasis basis =
          OrthonormalBasis::product(OrthonormalBasis::from_bloch(spec.basis_a),
                                    OrthonormalBasis::from_bloch(spec.basis_b));
      par::map_indices(static_cast<int>(states.size()), exec.jobs,
                       [&](int k) { series.values[k] = extended_rec(states[k], basis); });
      break;
    }
    case Quantifier::concurrence: {
      par::map_indices(static_cast<int>(states.size()), exec.jobs,
                       [&](int k) { series.values[k] = concurrence(states[k]); });
      break;
    }
    case Quantifier::trace_distance_pair:
      throw NumericalError("trajectory: trace_distance_pair needs a state pair, "
                           "use trace_distance_series");
  }
  return series;
}

QuantifierSeries trajectory(const ChannelFamily& family, const DensityMatrix& rho0_ab,
                            std::span<const double> tgrid, const QuantifierSpec& spec, Exec exec) {
  return trajectory_of_states(evolve_states(family, rho0_ab, tgrid, exec), tgrid, spec, exec);
}

QuantifierSeries local_trajectory(const ChannelFamily& family, const DensityMatrix& rho0,
                                  std::span<const double> tgrid, const BlochAngle& basis,
                                  Quantifier label, Exec exec) {
  const std::vector<DensityMatrix> states = evolve_states_local(family, rho0, tgrid, exec);
  const OrthonormalBasis b = OrthonormalBasis::from_bloch(basis);
  QuantifierSeries series;
  series.name = label;
  series.basis_a = basis;
  series.basis_b = basis;
  series.times.assign(tgrid.begin(), tgrid.end());
  series.values.assign(tgrid.size(), 0.0);
  par::map_indices(static_cast<int>(states.size()), exec.jobs,
                   [&](int k) { series.values[k] = rec(states[k], b); });
  return series;
}

QuantifierSeries trace_distance_series(const ChannelFamily& family, const DensityMatrix& rho0,
                                       const DensityMatrix& tau0, std::span<const double> tgrid,
                                       Exec exec) {
  check_grid(tgrid);
  QuantifierSeries series;
  series.name = Quantifier::trace_distance_pair;
  series.has_basis = false;
  series.times.assign(tgrid.begin(), tgrid.end());
  series.values.assign(tgrid.size(), 0.0);
  par::map_indices(static_cast<int>(tgrid.size()), exec.jobs, [&](int k) {
    const QubitChannel ch = channel_at(family, tgrid[k]);
    series.values[k] = trace_distance(ch.apply(rho0), ch.apply(tau0));
  });
  return series;
}

PositiveIncrease positive_increase(const QuantifierSeries& series, double derivative_threshold) {
  if (series.times.size() < 2)
    throw NumericalError("positive_increase: need at least two samples");
  PositiveIncrease out;
  bool open = false;
  for (std::size_t k = 0; k + 1 < series.times.size(); ++k) {
    const double dt = series.times[k + 1] - series.times[k];
    const double dv = series.values[k + 1] - series.values[k];
    if (dv / dt > derivative_threshold) {
      out.integral += dv;
      if (open) {
        out.intervals.back().t_end = series.times[k + 1];
      } else {
        out.intervals.push_back({series.times[k], series.times[k + 1]});
        open = true;
      }
    } else {
      open = false;
    }
  }
  return out;
}

std::vector<BlochAngle> default_basis_grid() {
  std::vector<BlochAngle> grid;
  // x-z plane family, polar angles 0..90 degrees
  for (int i = 0; i < 5; ++i) grid.emplace_back(i * std::numbers::pi / 8.0, 0.0);
  // 12 x 6 hemisphere
  for (int i = 0; i < 12; ++i)
    for (int j = 1; j <= 6; ++j)
      grid.emplace_back(j * (std::numbers::pi / 2.0) / 6.0, i * std::numbers::pi / 6.0);
  return grid;
}

std::vector<std::pair<DensityMatrix, DensityMatrix>> default_blp_pairs(unsigned seed) {
  std::vector<std::pair<DensityMatrix, DensityMatrix>> pairs;
  const double r = 1.0 / std::sqrt(2.0);
  pairs.emplace_back(DensityMatrix::pure({1.0, 0.0}), DensityMatrix::pure({0.0, 1.0}));
  pairs.emplace_back(DensityMatrix::pure({r, r}), DensityMatrix::pure({r, -r}));
  pairs.emplace_back(DensityMatrix::pure({r, cx(0, 1) * r}), DensityMatrix::pure({r, cx(0, -1) * r}));

  // Box-Muller from the raw engine keeps the pair set identical across
  // standard-library implementations.
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  auto gaussian = [&]() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  auto random_pure = [&]() {
    std::vector<cx> v(2);
    for (cx& a : v) a = cx(gaussian(), gaussian());
    return DensityMatrix::pure(v);
  };
  for (int k = 0; k < 50; ++k) {
    DensityMatrix a = random_pure();
    DensityMatrix b = random_pure();
    pairs.emplace_back(std::move(a), std::move(b));
  }
  return pairs;
}

NonMarkovReport n_qi(const ChannelFamily& family, std::span<const double> tgrid,
                     std::span<const BlochAngle> basis_grid, Exec exec) {
  check_grid(tgrid);
  if (basis_grid.empty()) throw NumericalError("n_qi: empty basis grid");

  const std::vector<DensityMatrix> states = evolve_states(family, bell_state(), tgrid, exec);

  auto objective = [&](const BlochAngle& angle) {
    const OrthonormalBasis bob = OrthonormalBasis::from_bloch(angle);
    QuantifierSeries series;
    series.times.assign(tgrid.begin(), tgrid.end());
    series.values.resize(tgrid.size());
    for (std::size_t k = 0; k < states.size(); ++k) series.values[k] = qi_rec(states[k], bob);
    return positive_increase(series).integral;
  };

  std::vector<double> integrals(basis_grid.size());
  par::map_indices(static_cast<int>(basis_grid.size()), exec.jobs,
                   [&](int k) { integrals[k] = objective(basis_grid[k]); });
  std::size_t best = 0;
  for (std::size_t k = 1; k < basis_grid.size(); ++k)
    if (integrals[k] > integrals[best]) best = k;

  BlochAngle best_basis = basis_grid[best];
  double best_value = integrals[best];

  // local refinement around the best grid basis, in tangent-plane coordinates
  const detail::SphereVector start{std::sin(best_basis.theta) * std::cos(best_basis.phi),
                                   std::sin(best_basis.theta) * std::sin(best_basis.phi),
                                   std::cos(best_basis.theta)};
  const detail::SphereMaxResult refined = detail::maximize_on_sphere(
      [&](const detail::SphereVector& dir) {
        return objective(
            BlochAngle(std::acos(std::clamp(dir.z, -1.0, 1.0)), std::atan2(dir.y, dir.x)));
      },
      start, 0.05, 1e-9, 120);
  if (refined.value > best_value) {
    best_value = refined.value;
    best_basis = BlochAngle(std::acos(std::clamp(refined.direction.z, -1.0, 1.0)),
                            std::atan2(refined.direction.y, refined.direction.x));
  }

  NonMarkovReport report;
  report.measure = Measure::n_qi;
  report.value = best_value;
  report.argmax_basis = best_basis;
  {
    const OrthonormalBasis bob = OrthonormalBasis::from_bloch(best_basis);
    QuantifierSeries series;
    series.times.assign(tgrid.begin(), tgrid.end());
    series.values.resize(tgrid.size());
    for (std::size_t k = 0; k < states.size(); ++k) series.values[k] = qi_rec(states[k], bob);
    report.violation_intervals = positive_increase(series).intervals;
  }
  report.non_markovian = report.value > kWitnessThreshold;
  return report;
}

NonMarkovReport blp(const ChannelFamily& family, std::span<const double> tgrid,
                    std::span<const std::pair<DensityMatrix, DensityMatrix>> pairs, Exec exec) {
  check_grid(tgrid);
  if (pairs.empty()) throw NumericalError("blp: empty pair list");

  std::vector<PositiveIncrease> results(pairs.size());
  par::map_indices(static_cast<int>(pairs.size()), exec.jobs, [&](int k) {
    const QuantifierSeries series =
        trace_distance_series(family, pairs[k].first, pairs[k].second, tgrid, Exec{1});
    results[k] = positive_increase(series);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < pairs.size(); ++k)
    if (results[k].integral > results[best].integral) best = k;

  NonMarkovReport report;
  report.measure = Measure::blp;
  report.value = results[best].integral;
  report.argmax_pair = static_cast<int>(best);
  report.violation_intervals = results[best].intervals;
  report.non_markovian = report.value > kWitnessThreshold;
  return report;
}

NonMarkovReport rhp(const ChannelFamily& family, std::span<const double> tgrid) {
  check_grid(tgrid);

  auto choi_state_trace_norm = [](const QubitChannel& step) {
    ComplexMatrix half = step.choi();
    half *= cx(0.5, 0.0);
    const HermEig eig = herm_eig(half);
    double s = 0.0;
    for (double lam : eig.values) s += std::abs(lam);
    return s;
  };

  NonMarkovReport report;
  report.measure = Measure::rhp;
  bool open = false;
  for (std::size_t k = 0; k + 1 < tgrid.size(); ++k) {
    double excess;
    try {
      excess = choi_state_trace_norm(intermediate_map(family, tgrid[k], tgrid[k + 1])) - 1.0;
    } catch (const NumericalError&) {
      if (k == 0) throw;
      // forward map singular at tgrid[k]: difference one-sidedly across the
      // previous point and attribute half of the two-step excess; when even
      // that map is singular the step contributes zero, keeping the total a
      // lower bound
      try {
        excess = 0.5 * (choi_state_trace_norm(intermediate_map(family, tgrid[k - 1], tgrid[k + 1])) -
                        1.0);
      } catch (const NumericalError&) {
        excess = 0.0;
      }
    }
    if (excess > kRhpStepFloor) {
      report.value += excess;
      if (open) {
        report.violation_intervals.back().t_end = tgrid[k + 1];
      } else {
        report.violation_intervals.push_back({tgrid[k], tgrid[k + 1]});
        open = true;
      }
    } else {
      open = false;
    }
  }
  report.non_markovian = report.value > kWitnessThreshold;
  return report;
}

NonMarkovReport monotonicity_witness(const QuantifierSeries& series) {
  if (series.name != Quantifier::qi_rec && series.name != Quantifier::sic)
    throw NumericalError("monotonicity_witness: series must be qi_rec or sic");
  if (series.times.size() < 2)
    throw NumericalError("monotonicity_witness: need at least two samples");

  NonMarkovReport report;
  report.measure = Measure::monotonicity_witness;
  bool open = false;
  for (std::size_t k = 0; k + 1 < series.times.size(); ++k) {
    const double dv = series.values[k + 1] - series.values[k];
    if (dv > kWitnessThreshold) {
      report.value += dv;
      if (open) {
        report.violation_intervals.back().t_end = series.times[k + 1];
      } else {
        report.violation_intervals.push_back({series.times[k], series.times[k + 1]});
        open = true;
      }
    } else {
      open = false;
    }
  }
  report.non_markovian = !report.violation_intervals.empty();
  return report;
}

}  // namespace qnm
