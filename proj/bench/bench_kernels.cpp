// Times the serial reference path (jobs = 1) against the OpenMP kernels for
// the hot loops: trajectory evaluation, the steering grid scan and the
// basis-grid measure. Outputs one row per kernel.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <vector>

#include "qnm/parallel.hpp"
#include "qnm/scenarios.hpp"

using namespace qnm;

namespace {

template <class F>
double time_of(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> linspace(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * k / (n - 1);
  return t;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.3f %10.3f %8.2fx\n", name, 1e3 * serial, 1e3 * parallel,
              serial / parallel);
}

}  // namespace

int main() {
  const int jobs = par::hardware_jobs();
  std::printf("hardware threads: %d\n", jobs);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial/ms", "omp/ms", "speedup");

  const double sigma = 2.0 * std::numbers::pi * 5.6e10;
  const double w1 = 2.0 * std::numbers::pi * 2.99792458e8 / 700.6e-9;
  const double w2 = 2.0 * std::numbers::pi * 2.99792458e8 / 703.3e-9;
  const ChannelFamily family =
      DephasingFamily{SpectralProfile({{0.65, w1, sigma}, {0.35, w2, sigma}}),
                      BlochAngle(0, 0), 1e-13};
  const double r = 1.0 / std::sqrt(2.0);
  const DensityMatrix bell = DensityMatrix::pure({r, 0.0, 0.0, r});
  const auto grid = linspace(0.0, 14.0, 400);

  {
    std::vector<DensityMatrix> out;
    const double serial = time_of([&] { out = evolve_states(family, bell, grid, Exec{1}); });
    const double parallel = time_of([&] { out = evolve_states(family, bell, grid, Exec{0}); });
    row("evolve_states (400 pts)", serial, parallel);
  }
  {
    QuantifierSpec spec;
    spec.kind = Quantifier::qi_rec;
    const auto states = evolve_states(family, bell, grid, Exec{0});
    QuantifierSeries s;
    const double serial =
        time_of([&] { s = trajectory_of_states(states, grid, spec, Exec{1}); });
    const double parallel =
        time_of([&] { s = trajectory_of_states(states, grid, spec, Exec{0}); });
    row("qi_rec series (400 pts)", serial, parallel);
  }
  {
    QuantifierSpec spec;
    spec.kind = Quantifier::sic;
    const auto short_grid = linspace(0.0, 14.0, 60);
    const auto states = evolve_states(family, bell, short_grid, Exec{0});
    QuantifierSeries s;
    const double serial =
        time_of([&] { s = trajectory_of_states(states, short_grid, spec, Exec{1}); });
    const double parallel =
        time_of([&] { s = trajectory_of_states(states, short_grid, spec, Exec{0}); });
    row("sic series (60 pts)", serial, parallel);
  }
  {
    const DensityMatrix probe = apply_local_a(channel_at(family, 5.0), bell);
    const OrthonormalBasis bob = OrthonormalBasis::computational(2);
    SicOptions serial_opts, parallel_opts;
    serial_opts.jobs = 1;
    parallel_opts.jobs = 0;
    double v = 0.0;
    const double serial = time_of([&] {
      for (int rep = 0; rep < 20; ++rep) v += sic(probe, bob, serial_opts).value;
    });
    const double parallel = time_of([&] {
      for (int rep = 0; rep < 20; ++rep) v += sic(probe, bob, parallel_opts).value;
    });
    row("sic grid scan (x20)", serial, parallel);
    if (v < 0) std::printf("impossible\n");  // keep the accumulator alive
  }
  {
    const auto bases = default_basis_grid();
    const auto short_grid = linspace(0.0, 14.0, 100);
    NonMarkovReport report;
    const double serial =
        time_of([&] { report = n_qi(family, short_grid, bases, Exec{1}); });
    const double parallel =
        time_of([&] { report = n_qi(family, short_grid, bases, Exec{0}); });
    row("n_qi basis grid (100 pts)", serial, parallel);
  }
  return 0;
}
