#include "mdkit/md_solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mdkit/parallel.hpp"
#include "mdkit/wave.hpp"

namespace mdkit {

namespace {

constexpr Complex kI{0.0, 1.0};

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace

PotentialInit parse_potential_init(std::string_view name) {
  if (name == "zero") return PotentialInit::zero;
  if (name == "poisson") return PotentialInit::poisson;
  throw std::invalid_argument("unknown potential init '" + std::string(name) + "'");
}

std::string_view to_string(PotentialInit p) {
  return p == PotentialInit::zero ? "zero" : "poisson";
}

std::array<double, 4> charge_current(const Spinor& s) {
  const Complex a = std::conj(s[0]) * s[3];
  const Complex b = std::conj(s[1]) * s[2];
  const Complex c = std::conj(s[0]) * s[2];
  const Complex d = std::conj(s[1]) * s[3];
  return {std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) + std::norm(s[3]),
          2.0 * (a.real() + b.real()), 2.0 * (a.imag() - b.imag()), 2.0 * (c.real() - d.real())};
}

PotentialState gauge_consistent_init(const Fft& fft, const SpinorField& psi0, const SimConfig& cfg,
                                     PotentialInit v0, PotentialInit a0,
                                     std::vector<std::string>* warnings, double warn_fraction) {
  const GridSpec& grid = psi0.grid;
  PotentialState pot(grid, psi0.time);
  if (v0 == PotentialInit::zero && a0 == PotentialInit::zero) return pot;

  const std::size_t n = grid.size();
  ComplexField src(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = charge_current(psi0.spinor(i));
    for (int c = 0; c < 4; ++c) src[4 * i + c] = q[c];
  }
  if (warnings != nullptr) {
    static constexpr const char* names[4] = {"rho", "J1", "J2", "J3"};
    for (int c = 0; c < 4; ++c) {
      if (c == 0 ? v0 == PotentialInit::zero : a0 == PotentialInit::zero) continue;
      const double mean = ordered_sum(n, [&](std::size_t i) { return src[4 * i + c].real(); }) /
                          static_cast<double>(n);
      const double sq = ordered_sum(n, [&](std::size_t i) { return std::norm(src[4 * i + c]); });
      if (sq == 0.0) continue;
      const double fraction = std::abs(mean) * std::sqrt(static_cast<double>(n) / sq);
      if (fraction > warn_fraction) {
        std::ostringstream msg;
        msg << "poisson init: removing the mean of " << names[c] << " changes it by "
            << fraction << " of its l2 norm";
        warnings->push_back(msg.str());
      }
    }
  }
  fft.forward(src, 4);

  const auto& ladder = fft.ladder();
  ComplexField x(4 * n), xt(4 * n);
  const double eps = cfg.epsilon;
  const double delta = cfg.delta;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double k2 = ladder.norm2(i);
    if (k2 == 0.0) continue;
    if (v0 == PotentialInit::poisson) x[4 * i] = eps * src[4 * i] / k2;
    if (a0 == PotentialInit::poisson) {
      // eps delta times J = delta^-1 <psi, alpha psi> is eps <psi, alpha psi>.
      Complex div = 0.0;
      const Vec3 kd = ladder.derivative_at(i);
      for (int k = 0; k < 3; ++k) {
        x[4 * i + 1 + k] = eps * src[4 * i + 1 + k] / k2;
        div += kd[k] * x[4 * i + 1 + k];
      }
      xt[4 * i] = -kI * div / delta;
    }
  }
  fft.inverse(x, 4);
  fft.inverse(xt, 4);
  for (std::size_t i = 0; i < n; ++i) {
    pot.v[i] = x[4 * i].real();
    pot.v_t[i] = xt[4 * i].real();
    for (int k = 0; k < 3; ++k) pot.a[k][i] = x[4 * i + 1 + k].real();
  }
  return pot;
}

MdSolver::MdSolver(SimConfig cfg) : cfg_(std::move(cfg)), fft_(cfg_.grid) { cfg_.validate(); }

MdState MdSolver::initial_state(const SpinorField& psi0, PotentialInit v0, PotentialInit a0,
                                std::vector<std::string>* warnings, double warn_fraction) const {
  if (!(psi0.grid == cfg_.grid)) throw std::invalid_argument("initial_state: grid mismatch");
  return MdState{psi0, gauge_consistent_init(fft_, psi0, cfg_, v0, a0, warnings, warn_fraction), 0};
}

const DiracSymbolTables& MdSolver::tables(double dt) {
  for (const auto& t : cache_) {
    if (t->dt() == dt) return *t;
  }
  cache_.push_back(
      std::make_unique<DiracSymbolTables>(fft_.ladder(), dt, cfg_.epsilon, cfg_.delta));
  return *cache_.back();
}

ComplexField MdSolver::sources(const SpinorField& psi) const {
  const std::size_t n = psi.points();
  ComplexField src(4 * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto q = charge_current(psi.spinor(static_cast<std::size_t>(i)));
    for (int c = 0; c < 4; ++c) src[4 * i + c] = q[c];
  }
  fft_.forward(src, 4);
  return src;
}

void MdSolver::step1(MdState& state, double dt) {
  const DiracSymbolTables& tab = tables(dt);
  ComplexField src = sources(state.psi);

  fft_.forward(state.psi.data, 4);
  tab.apply_all(state.psi.data);
  fft_.inverse(state.psi.data, 4);

  const ComplexField src_new = sources(state.psi);
  for (std::size_t i = 0; i < src.size(); ++i) src[i] += src_new[i];
  const auto& ladder = fft_.ladder();
  if (cfg_.dealias) {
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      if (!ladder.in_two_thirds(i)) {
        for (int c = 0; c < 4; ++c) src[4 * i + c] = 0.0;
      }
    }
  }

  // The A sources carry eps delta * delta^-1 <psi, alpha psi>, so one
  // coupling eps serves all four components.
  advance_potentials(fft_, state.pot, src, dt, cfg_.delta, cfg_.epsilon);

  state.psi.time += dt;
  state.pot.time = state.psi.time;
}

void MdSolver::step2(SpinorField& psi, const PotentialState& pot, double dt,
                     double t_eval) const {
  const auto& ext = cfg_.external;
  const bool has_v = ext.has_v();
  const bool has_a = ext.has_a();
  const double rate = dt / cfg_.epsilon;
  const auto n = static_cast<std::ptrdiff_t>(psi.points());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double w = pot.v[i];
    Vec3 a{pot.a[0][i], pot.a[1][i], pot.a[2][i]};
    if (has_v || has_a) {
      const Vec3 x = psi.grid.point(i);
      if (has_v) w += ext.v_ex(t_eval, x);
      if (has_a) {
        const Vec3 e = ext.a_ex(t_eval, x);
        for (int k = 0; k < 3; ++k) a[k] += e[k];
      }
    }
    const double r = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const Complex phase = std::polar(1.0, -w * rate);
    const Complex c = phase * std::cos(r * rate);
    const Complex g = phase * kI * rate * sinc(r * rate);
    const Spinor s = psi.spinor(i);
    const Spinor as = apply_alpha_dot(a, s);
    Spinor out;
    for (int k = 0; k < 4; ++k) out[k] = c * s[k] + g * as[k];
    psi.set(i, out);
  }
}

void MdSolver::advance(MdState& state) {
  const double dt = cfg_.dt;
  const double t0 = state.time();
  if (cfg_.splitting == Splitting::strang) {
    step1(state, 0.5 * dt);
    step2(state.psi, state.pot, dt, t0 + 0.5 * dt);
    step1(state, 0.5 * dt);
  } else {
    step1(state, dt);
    step2(state.psi, state.pot, dt, t0 + dt);
  }
  ++state.step_index;
  state.psi.time = t0 + dt;
  state.pot.time = state.psi.time;
}

}  // namespace mdkit
