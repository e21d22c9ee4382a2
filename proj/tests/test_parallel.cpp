// The OpenMP kernels must reproduce the serial reference bit for bit: every
// element is computed independently and all reductions run serially.

#include <numbers>

#include "doctest.h"
#include "qnm/parallel.hpp"
#include "qnm/scenarios.hpp"
#include "test_helpers.hpp"

using namespace qnm;
using namespace qnm_test;

namespace {

std::vector<double> linspace(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * k / (n - 1);
  return t;
}

ChannelFamily test_family() { return ChannelFamily{RandomUnitaryFamily{1.0, 3.8}}; }

bool identical(const QuantifierSeries& a, const QuantifierSeries& b) {
  if (a.values.size() != b.values.size()) return false;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    if (a.values[k] != b.values[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("map kernels agree") {
  std::vector<double> serial(1000), parallel(1000);
  auto fill = [](std::vector<double>& out) {
    return [&out](int i) { out[i] = std::sin(0.1 * i) * std::sqrt(i + 1.0); };
  };
  par::map_serial(1000, fill(serial));
  par::map_openmp(1000, 4, fill(parallel));
  CHECK(serial == parallel);
}

TEST_CASE("exceptions cross the parallel region") {
  CHECK_THROWS_AS(par::map_openmp(64, 4,
                                  [](int i) {
                                    if (i == 37) throw NumericalError("boom");
                                  }),
                  NumericalError);
}

TEST_CASE("evolved states match across job counts") {
  const auto grid = linspace(0.0, 12.5, 60);
  const auto a = evolve_states(test_family(), bell_phi_plus(), grid, Exec{1});
  const auto b = evolve_states(test_family(), bell_phi_plus(), grid, Exec{4});
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(max_abs_diff(a[k].mat(), b[k].mat()) == 0.0);
}

TEST_CASE("series match across job counts") {
  const auto grid = linspace(0.0, 12.5, 40);
  QuantifierSpec spec;
  spec.kind = Quantifier::sic;
  const QuantifierSeries serial = trajectory(test_family(), bell_phi_plus(), grid, spec, Exec{1});
  const QuantifierSeries parallel = trajectory(test_family(), bell_phi_plus(), grid, spec, Exec{4});
  CHECK(identical(serial, parallel));
}

TEST_CASE("sic grid scan matches across job counts") {
  Rng rng(97);
  const DensityMatrix rho = random_density(rng, 4);
  const OrthonormalBasis bob = OrthonormalBasis::computational(2);
  SicOptions serial_opts, parallel_opts;
  serial_opts.jobs = 1;
  parallel_opts.jobs = 4;
  const SicResult a = sic(rho, bob, serial_opts);
  const SicResult b = sic(rho, bob, parallel_opts);
  CHECK(a.value == b.value);
  CHECK(a.optimal_measurement.angle.theta == b.optimal_measurement.angle.theta);
  CHECK(a.optimal_measurement.angle.phi == b.optimal_measurement.angle.phi);
}

TEST_CASE("measures match across job counts") {
  const auto grid = linspace(0.0, 12.5, 50);
  const auto bases = default_basis_grid();
  const NonMarkovReport a = n_qi(test_family(), grid, bases, Exec{1});
  const NonMarkovReport b = n_qi(test_family(), grid, bases, Exec{4});
  CHECK(a.value == b.value);
  CHECK(a.argmax_basis->theta == b.argmax_basis->theta);

  const auto pairs = default_blp_pairs();
  const NonMarkovReport c = blp(test_family(), grid, pairs, Exec{1});
  const NonMarkovReport d = blp(test_family(), grid, pairs, Exec{4});
  CHECK(c.value == d.value);
  CHECK(*c.argmax_pair == *d.argmax_pair);
}

TEST_CASE("scenario csv is identical for any job count") {
  KvMap kv = registry().at("nonmarkov-ru-fig-a22");
  apply_override(kv, "time_grid.n_points=30");
  const ScenarioConfig cfg = parse_scenario(kv);
  std::ostringstream serial_csv, parallel_csv;
  export_csv(run_scenario(cfg, Exec{1}), serial_csv);
  export_csv(run_scenario(cfg, Exec{0}), parallel_csv);
  CHECK(serial_csv.str() == parallel_csv.str());
}
