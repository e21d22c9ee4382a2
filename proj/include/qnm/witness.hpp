#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnm/channels.hpp"
#include "qnm/measures.hpp"

namespace qnm {

enum class Quantifier {
  qi_rec,
  sic,
  rec_local_a,
  rec_local_b,
  extended_rec,
  concurrence,
  trace_distance_pair,
};

std::string quantifier_name(Quantifier q);
std::optional<Quantifier> quantifier_from_name(const std::string& name);

/// What to evaluate along a trajectory. basis_b is the Bob reference
/// direction for qi_rec / sic / rec_local_b and the B factor of the product
/// basis for extended_rec; basis_a is the A-side reference for rec_local_a
/// and the A factor for extended_rec.
struct QuantifierSpec {
  Quantifier kind = Quantifier::qi_rec;
  BlochAngle basis_a{};
  BlochAngle basis_b{};
  SicOptions sic_options{};
};

struct QuantifierSeries {
  Quantifier name = Quantifier::qi_rec;
  BlochAngle basis_a{};
  BlochAngle basis_b{};
  bool has_basis = true;
  std::vector<double> times;
  std::vector<double> values;
};

struct Interval {
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct PositiveIncrease {
  double integral = 0.0;
  std::vector<Interval> intervals;
};

enum class Measure { n_qi, blp, rhp, monotonicity_witness };

struct NonMarkovReport {
  Measure measure = Measure::n_qi;
  std::string subject;  // optional label of the series or family examined
  double value = 0.0;
  bool non_markovian = false;
  std::optional<BlochAngle> argmax_basis;
  std::optional<int> argmax_pair;
  std::vector<Interval> violation_intervals;
};

/// Parallelism control for the trajectory/grid kernels; jobs = 1 selects the
/// serial reference path, 0 all hardware threads.
struct Exec {
  int jobs = 1;
};

/// Forward-evolved two-qubit states (channel (x) identity on the Bell pair or
/// any other initial state) over the grid.
std::vector<DensityMatrix> evolve_states(const ChannelFamily& family, const DensityMatrix& rho0_ab,
                                         std::span<const double> tgrid, Exec exec = {});

/// Forward-evolved single-qubit states.
std::vector<DensityMatrix> evolve_states_local(const ChannelFamily& family,
                                               const DensityMatrix& rho0,
                                               std::span<const double> tgrid, Exec exec = {});

/// Quantifier evaluated on the evolved two-qubit trajectory.
QuantifierSeries trajectory(const ChannelFamily& family, const DensityMatrix& rho0_ab,
                            std::span<const double> tgrid, const QuantifierSpec& spec,
                            Exec exec = {});

/// Same, but on already evolved states (avoids recomputing the evolution when
/// several quantifiers share one trajectory).
QuantifierSeries trajectory_of_states(const std::vector<DensityMatrix>& states,
                                      std::span<const double> tgrid, const QuantifierSpec& spec,
                                      Exec exec = {});

/// REC series of a single-qubit trajectory in the given reference direction.
QuantifierSeries local_trajectory(const ChannelFamily& family, const DensityMatrix& rho0,
                                  std::span<const double> tgrid, const BlochAngle& basis,
                                  Quantifier label, Exec exec = {});

/// Trace-distance series between two co-evolving single-qubit states.
QuantifierSeries trace_distance_series(const ChannelFamily& family, const DensityMatrix& rho0,
                                       const DensityMatrix& tau0, std::span<const double> tgrid,
                                       Exec exec = {});

/// Trapezoidal integral of the positive part of the series derivative;
/// steps with derivative below the jitter threshold are ignored. Intervals
/// are reported at grid resolution.
PositiveIncrease positive_increase(const QuantifierSeries& series,
                                   double derivative_threshold = 1e-9);

/// Default Bob-basis grid: 12 x 6 hemisphere points plus the x-z plane
/// family used throughout the scenario set.
std::vector<BlochAngle> default_basis_grid();

/// Default state pairs for the distinguishability witness: the three
/// antipodal Pauli eigenstate pairs plus 50 seeded random pure pairs.
std::vector<std::pair<DensityMatrix, DensityMatrix>> default_blp_pairs(unsigned seed = 20260809);

/// Integrated positive increase of qi_rec on the maximally entangled input,
/// maximized over a Bob-basis grid with local refinement. A certified lower
/// bound of the basis supremum.
NonMarkovReport n_qi(const ChannelFamily& family, std::span<const double> tgrid,
                     std::span<const BlochAngle> basis_grid, Exec exec = {});

/// Integrated positive increase of the trace distance, maximized over the
/// pair list. A lower bound of the full pair optimization.
NonMarkovReport blp(const ChannelFamily& family, std::span<const double> tgrid,
                    std::span<const std::pair<DensityMatrix, DensityMatrix>> pairs,
                    Exec exec = {});

/// Trace-norm excess of the Choi state of each grid-step intermediate map,
/// summed over the grid.
NonMarkovReport rhp(const ChannelFamily& family, std::span<const double> tgrid);

/// Flags a series as non-Markovian when any increase exceeds the jitter
/// threshold (1e-7). Sound on CP-divisible families; makes no completeness
/// claim.
NonMarkovReport monotonicity_witness(const QuantifierSeries& series);

}  // namespace qnm
