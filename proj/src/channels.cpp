#include "qnm/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qnm {

namespace {

constexpr double kTpTol = 1e-8;
constexpr double kCpTol = 1e-9;
constexpr double kConditionLimit = 1e8;

const std::array<const ComplexMatrix*, 4> pauli_set() {
  static const ComplexMatrix id = ComplexMatrix::identity(2);
  return {&id, &pauli_x(), &pauli_y(), &pauli_z()};
}

// sinh(z)/z, stable near zero.
cx sinhc(cx z) {
  if (std::abs(z) < 1e-6) {
    const cx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

}  // namespace

SpectralProfile::SpectralProfile(std::vector<SpectralComponent> components)
    : comps_(std::move(components)) {
  if (comps_.empty()) throw NumericalError("SpectralProfile: no components");
  double sum = 0.0;
  for (const SpectralComponent& c : comps_) {
    if (c.weight <= 0.0) throw NumericalError("SpectralProfile: weights must be positive");
    if (c.sigma_omega <= 0.0) throw NumericalError("SpectralProfile: sigmas must be positive");
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw NumericalError("SpectralProfile: weights must sum to 1 within 1e-12");
}

SpectralProfile SpectralProfile::single_gaussian(double center_omega, double sigma_omega) {
  return SpectralProfile({{1.0, center_omega, sigma_omega}});
}

cx kappa(const SpectralProfile& profile, double tau) {
  if (tau < 0.0) throw NumericalError("kappa: tau must be nonnegative");
  cx k{};
  for (const SpectralComponent& c : profile.components()) {
    const double envelope = std::exp(-0.5 * c.sigma_omega * c.sigma_omega * tau * tau);
    k += c.weight * envelope * std::polar(1.0, -c.center_omega * tau);
  }
  return k;
}

cx ad_G(const AmplitudeDampingFamily& family, double t) {
  if (family.gamma0 <= 0.0 || family.lambda <= 0.0)
    throw NumericalError("ad_G: gamma0 and lambda must be positive");
  const cx d = std::sqrt(cx(family.lambda * family.lambda - 2.0 * family.gamma0 * family.lambda));
  const cx u = d * (t / 2.0);
  // cosh(dt/2) + lambda * (t/2) * sinhc(dt/2); the sinhc form covers d -> 0
  const cx inner = std::cosh(u) + family.lambda * (t / 2.0) * sinhc(u);
  return std::exp(-family.lambda * t / 2.0) * inner;
}

cx ad_log_derivative(const AmplitudeDampingFamily& family, double t) {
  const cx d = std::sqrt(cx(family.lambda * family.lambda - 2.0 * family.gamma0 * family.lambda));
  const cx u = d * (t / 2.0);
  const cx sh = (t / 2.0) * sinhc(u);  // sinh(dt/2)/d
  const cx inner = std::cosh(u) + family.lambda * sh;
  return -family.gamma0 * family.lambda * sh / inner;
}

std::vector<double> ad_G_zeros(const AmplitudeDampingFamily& family, double t_max) {
  // G is real for this family (d is real or purely imaginary), so zeros are
  // sign changes of the real part.
  const int n = 4000;
  std::vector<double> zeros;
  double prev = ad_G(family, 0.0).real();
  for (int i = 1; i <= n; ++i) {
    const double t = t_max * i / n;
    const double cur = ad_G(family, t).real();
    if (prev == 0.0) {
      zeros.push_back(t_max * (i - 1) / n);
    } else if (prev * cur < 0.0) {
      double a = t_max * (i - 1) / n, b = t;
      double fa = prev;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = ad_G(family, m).real();
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      zeros.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return zeros;
}

std::array<double, 4> ru_weights(const RandomUnitaryFamily& family, double t) {
  if (family.c <= 0.0) throw NumericalError("ru_weights: c must be positive");
  if (t < 0.0) throw NumericalError("ru_weights: t must be nonnegative");
  const double e2 = std::exp(-2.0 * family.c * t);
  if (family.lambda_nm <= 0.0) {
    return {(1.0 + 3.0 * e2) / 4.0, (1.0 - e2) / 4.0, (1.0 - e2) / 4.0, (1.0 - e2) / 4.0};
  }
  const double mix =
      std::exp(-family.c * t - family.lambda_nm * std::sin(family.c * t));
  return {(1.0 + e2 + 2.0 * mix) / 4.0, (1.0 - e2) / 4.0, (1.0 - e2) / 4.0,
          (1.0 + e2 - 2.0 * mix) / 4.0};
}

QubitChannel::QubitChannel(ComplexMatrix choi) : choi_(std::move(choi)) {
  if (choi_.dim() != 4) throw NumericalError("QubitChannel: Choi matrix must be 4x4");
  if (choi_.hermiticity_defect() > 1e-8)
    throw NumericalError("QubitChannel: Choi matrix is not Hermitian");

  // trace over the output (first) factor must give the identity for a
  // trace-preserving map
  ComplexMatrix reduced(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p) reduced(i, j) += choi_(2 * p + i, 2 * p + j);
  trace_preserving_ = max_abs_diff(reduced, identity2()) < kTpTol;

  const HermEig eig = herm_eig(choi_);
  choi_min_eig_ = eig.values.back();
  cp_ = choi_min_eig_ >= -kCpTol;
}

QubitChannel QubitChannel::identity() {
  return from_map([](const ComplexMatrix& m) { return m; });
}

QubitChannel QubitChannel::from_map(
    const std::function<ComplexMatrix(const ComplexMatrix&)>& map) {
  ComplexMatrix choi(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      ComplexMatrix e(2);
      e(i, j) = 1.0;
      const ComplexMatrix me = map(e);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) choi(2 * p + i, 2 * q + j) = me(p, q);
    }
  return QubitChannel(choi);
}

QubitChannel QubitChannel::from_choi(const ComplexMatrix& choi) { return QubitChannel(choi); }

QubitChannel QubitChannel::from_ptm(const Ptm& t) {
  const auto sigma = pauli_set();
  ComplexMatrix choi(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (t[4 * i + j] == 0.0) continue;
      const ComplexMatrix term = kron(*sigma[i], sigma[j]->transpose());
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) choi(r, c) += 0.5 * t[4 * i + j] * term(r, c);
    }
  return QubitChannel(choi);
}

Ptm QubitChannel::ptm() const {
  const auto sigma = pauli_set();
  Ptm t{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const ComplexMatrix probe = kron(*sigma[i], sigma[j]->transpose());
      cx val{};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) val += choi_(r, c) * probe(c, r);
      t[4 * i + j] = 0.5 * val.real();
    }
  return t;
}

ComplexMatrix QubitChannel::apply_matrix(const ComplexMatrix& rho) const {
  if (rho.dim() != 2) throw NumericalError("QubitChannel::apply: need a 2x2 input");
  ComplexMatrix out(2);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      cx v{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v += choi_(2 * p + i, 2 * q + j) * rho(i, j);
      out(p, q) = v;
    }
  return out;
}

DensityMatrix QubitChannel::apply(const DensityMatrix& rho) const {
  return DensityMatrix::from_matrix(apply_matrix(rho.mat()));
}

QubitChannel dephasing_channel(const DephasingFamily& family, double t) {
  if (t < 0.0) throw NumericalError("dephasing_channel: t must be nonnegative");
  const cx k = kappa(family.profile, family.path_scale * t);
  const OrthonormalBasis basis = OrthonormalBasis::from_bloch(family.axis);
  const ComplexMatrix pp = basis.projector(0);
  const ComplexMatrix pm = basis.projector(1);
  return QubitChannel::from_map([&](const ComplexMatrix& rho) {
    return pp * rho * pp + pm * rho * pm + k * (pp * rho * pm) + std::conj(k) * (pm * rho * pp);
  });
}

QubitChannel amplitude_damping_channel(cx g) {
  const double mag = std::abs(g);
  if (mag > 1.0 + 1e-9) throw NumericalError("amplitude_damping_channel: |G| must be <= 1");
  const double loss = std::sqrt(std::max(0.0, 1.0 - mag * mag));
  ComplexMatrix k0(2, {1.0, 0.0, 0.0, g});
  ComplexMatrix k1(2, {0.0, loss, 0.0, 0.0});  // |0><1| * sqrt(1 - |G|^2)
  return QubitChannel::from_map([&](const ComplexMatrix& rho) {
    return k0 * rho * k0.adjoint() + k1 * rho * k1.adjoint();
  });
}

QubitChannel random_unitary_channel(const std::array<double, 4>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw NumericalError("random_unitary_channel: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw NumericalError("random_unitary_channel: weights must sum to 1");
  const auto sigma = pauli_set();
  return QubitChannel::from_map([&](const ComplexMatrix& rho) {
    ComplexMatrix out(2);
    for (int i = 0; i < 4; ++i) {
      if (weights[i] == 0.0) continue;
      out += weights[i] * ((*sigma[i]) * rho * (*sigma[i]));
    }
    return out;
  });
}

QubitChannel channel_at(const ChannelFamily& family, double t) {
  return std::visit(
      [t](const auto& f) -> QubitChannel {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, DephasingFamily>) {
          return dephasing_channel(f, t);
        } else if constexpr (std::is_same_v<T, AmplitudeDampingFamily>) {
          return amplitude_damping_channel(ad_G(f, t));
        } else {
          return random_unitary_channel(ru_weights(f, t));
        }
      },
      family);
}

ComplexMatrix apply_local_a_matrix(const QubitChannel& channel, const ComplexMatrix& rho_ab) {
  if (rho_ab.dim() != 4) throw NumericalError("apply_local_a: need a two-qubit state");
  const ComplexMatrix& choi = channel.choi();
  ComplexMatrix out(4);
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < 2; ++a)
      for (int q = 0; q < 2; ++q)
        for (int b = 0; b < 2; ++b) {
          cx v{};
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              v += choi(2 * p + i, 2 * q + j) * rho_ab(2 * i + a, 2 * j + b);
          out(2 * p + a, 2 * q + b) = v;
        }
  return out;
}

DensityMatrix apply_local_a(const QubitChannel& channel, const DensityMatrix& rho_ab) {
  return DensityMatrix::from_matrix(apply_local_a_matrix(channel, rho_ab.mat()));
}

namespace {

Ptm ptm_multiply(const Ptm& a, const Ptm& b) {
  Ptm out{};
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) {
      const double ark = a[4 * r + k];
      if (ark == 0.0) continue;
      for (int c = 0; c < 4; ++c) out[4 * r + c] += ark * b[4 * k + c];
    }
  return out;
}

double ptm_condition_number(const Ptm& t) {
  // singular values via the spectrum of T^T T
  ComplexMatrix tt(4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += t[4 * k + r] * t[4 * k + c];
      tt(r, c) = v;
    }
  const HermEig eig = herm_eig(tt);
  const double smax = std::sqrt(std::max(0.0, eig.values.front()));
  const double smin_sq = eig.values.back();
  if (smin_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / std::sqrt(smin_sq);
}

Ptm ptm_invert(Ptm a) {
  Ptm inv{};
  for (int i = 0; i < 4; ++i) inv[4 * i + i] = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[4 * r + col]) > std::abs(a[4 * piv + col])) piv = r;
    if (std::abs(a[4 * piv + col]) < 1e-300)
      throw NumericalError("intermediate_map: forward map is singular");
    if (piv != col)
      for (int c = 0; c < 4; ++c) {
        std::swap(a[4 * piv + c], a[4 * col + c]);
        std::swap(inv[4 * piv + c], inv[4 * col + c]);
      }
    const double scale = 1.0 / a[4 * col + col];
    for (int c = 0; c < 4; ++c) {
      a[4 * col + c] *= scale;
      inv[4 * col + c] *= scale;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[4 * r + col];
      if (f == 0.0) continue;
      for (int c = 0; c < 4; ++c) {
        a[4 * r + c] -= f * a[4 * col + c];
        inv[4 * r + c] -= f * inv[4 * col + c];
      }
    }
  }
  return inv;
}

}  // namespace

QubitChannel compose(const QubitChannel& a, const QubitChannel& b) {
  return QubitChannel::from_ptm(ptm_multiply(a.ptm(), b.ptm()));
}

QubitChannel intermediate_map(const ChannelFamily& family, double s, double t) {
  if (t < s || s < 0.0) throw NumericalError("intermediate_map: need t >= s >= 0");
  const Ptm ts = channel_at(family, s).ptm();
  const double cond = ptm_condition_number(ts);
  if (!(cond < kConditionLimit))
    throw NumericalError("intermediate_map: forward map at s=" + std::to_string(s) +
                         " is singular (condition number " + std::to_string(cond) + ")");
  const Ptm tt = channel_at(family, t).ptm();
  return QubitChannel::from_ptm(ptm_multiply(tt, ptm_invert(ts)));
}

DivisibilityReport is_cp_divisible(const ChannelFamily& family, std::span<const double> tgrid) {
  if (tgrid.size() < 2) throw NumericalError("is_cp_divisible: need at least two grid points");
  for (std::size_t k = 1; k < tgrid.size(); ++k)
    if (!(tgrid[k] > tgrid[k - 1]))
      throw NumericalError("is_cp_divisible: grid must be strictly increasing");
  DivisibilityReport report;
  for (std::size_t k = 0; k + 1 < tgrid.size(); ++k) {
    const QubitChannel step = intermediate_map(family, tgrid[k], tgrid[k + 1]);
    if (!step.completely_positive()) {
      report.cp_divisible = false;
      report.first_violation_time = tgrid[k];
      return report;
    }
  }
  return report;
}

GeneratorSchedule schedule_for(const AmplitudeDampingFamily& family) {
  GeneratorSchedule s;
  s.kind = GeneratorSchedule::Kind::amplitude_damping;
  s.lamb_shift = [family](double t) { return -2.0 * ad_log_derivative(family, t).imag(); };
  s.gamma = [family](double t) { return -2.0 * ad_log_derivative(family, t).real(); };
  return s;
}

GeneratorSchedule schedule_for(const RandomUnitaryFamily& family) {
  GeneratorSchedule s;
  s.kind = GeneratorSchedule::Kind::multiple_decoherence;
  s.gammas[0] = [family](double) { return family.c / 2.0; };
  s.gammas[1] = [family](double) { return family.c / 2.0; };
  if (family.lambda_nm <= 0.0) {
    s.gammas[2] = [family](double) { return family.c / 2.0; };
  } else {
    s.gammas[2] = [family](double t) {
      return family.c * family.lambda_nm * std::cos(family.c * t) / 2.0;
    };
  }
  return s;
}

namespace {

ComplexMatrix master_rhs(const GeneratorSchedule& schedule, double t, const ComplexMatrix& rho) {
  ComplexMatrix out(2);
  if (schedule.kind == GeneratorSchedule::Kind::amplitude_damping) {
    const double shift = schedule.lamb_shift(t);
    const double g = schedule.gamma(t);
    // -i/4 S [sz, rho]
    const ComplexMatrix& sz = pauli_z();
    ComplexMatrix comm = sz * rho - rho * sz;
    comm *= cx(0.0, -shift / 4.0);
    out += comm;
    // g * (s- rho s+ - 1/2 {s+ s-, rho}); |1> is the decaying level
    ComplexMatrix sm(2, {0.0, 1.0, 0.0, 0.0});
    ComplexMatrix sp = sm.adjoint();
    ComplexMatrix diss = sm * rho * sp;
    ComplexMatrix anti = sp * sm * rho + rho * (sp * sm);
    anti *= cx(0.5, 0.0);
    diss -= anti;
    diss *= cx(g, 0.0);
    out += diss;
  } else {
    // d rho/dt = sum_i g_i(t) (s_i rho s_i - rho)
    const std::array<const ComplexMatrix*, 3> sigma = {&pauli_x(), &pauli_y(), &pauli_z()};
    for (int i = 0; i < 3; ++i) {
      const double g = schedule.gammas[i](t);
      if (g == 0.0) continue;
      ComplexMatrix term = (*sigma[i]) * rho * (*sigma[i]) - rho;
      term *= cx(g, 0.0);
      out += term;
    }
  }
  return out;
}

double max_rate(const GeneratorSchedule& schedule, double t) {
  if (schedule.kind == GeneratorSchedule::Kind::amplitude_damping)
    return std::max(std::abs(schedule.gamma(t)), std::abs(schedule.lamb_shift(t)));
  double m = 0.0;
  for (const auto& g : schedule.gammas) m = std::max(m, std::abs(g(t)));
  return m;
}

}  // namespace

std::vector<DensityMatrix> integrate_master(const GeneratorSchedule& schedule,
                                            const DensityMatrix& rho0,
                                            std::span<const double> tgrid) {
  if (rho0.dim() != 2) throw NumericalError("integrate_master: need a qubit state");
  if (tgrid.size() < 1) throw NumericalError("integrate_master: empty grid");
  for (std::size_t k = 1; k < tgrid.size(); ++k)
    if (!(tgrid[k] > tgrid[k - 1]))
      throw NumericalError("integrate_master: grid must be strictly increasing");

  std::vector<DensityMatrix> out;
  out.reserve(tgrid.size());
  out.push_back(rho0);
  ComplexMatrix rho = rho0.mat();

  for (std::size_t k = 0; k + 1 < tgrid.size(); ++k) {
    const double t0 = tgrid[k];
    const double t1 = tgrid[k + 1];
    const double dt = t1 - t0;
    const double rate = std::max({max_rate(schedule, t0), max_rate(schedule, 0.5 * (t0 + t1)),
                                  max_rate(schedule, t1), 1e-12});
    const double h_target = std::min(dt, 1e-3 / rate);
    const long nsub = static_cast<long>(std::ceil(dt / h_target));
    if (nsub > 2'000'000)
      throw NumericalError("integrate_master: rate too large near t=" + std::to_string(t0) +
                           ", step size underflow");
    const double h = dt / static_cast<double>(nsub);

    for (long step = 0; step < nsub; ++step) {
      const double t = t0 + h * static_cast<double>(step);
      const ComplexMatrix k1 = master_rhs(schedule, t, rho);
      const ComplexMatrix k2 = master_rhs(schedule, t + 0.5 * h, rho + cx(0.5 * h, 0) * k1);
      const ComplexMatrix k3 = master_rhs(schedule, t + 0.5 * h, rho + cx(0.5 * h, 0) * k2);
      const ComplexMatrix k4 = master_rhs(schedule, t + h, rho + cx(h, 0) * k3);
      ComplexMatrix incr = k1 + 2.0 * k2 + 2.0 * k3 + k4;
      incr *= cx(h / 6.0, 0.0);
      rho += incr;

      const double drift = std::abs(rho.trace().real() - 1.0);
      if (drift >= 1e-9)
        throw NumericalError("integrate_master: trace drift " + std::to_string(drift) +
                             " at t=" + std::to_string(t + h) + ", reduce the step size");
      rho *= cx(1.0 / rho.trace().real(), 0.0);
    }
    out.push_back(DensityMatrix::from_matrix(rho));
  }
  return out;
}

}  // namespace qnm
