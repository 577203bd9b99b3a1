#include "mdkit/wkb_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mdkit/parallel.hpp"
#include "mdkit/wave.hpp"

namespace mdkit {

namespace {

constexpr Complex kI{0.0, 1.0};

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

inline int wrap(int m, int n) { return ((m % n) + n) % n; }

struct OneSided {
  std::array<RealField, 3> minus;
  std::array<RealField, 3> plus;
};

// Second-order one-sided derivatives p-, p+ along each axis.
OneSided one_sided_gradients(const GridSpec& grid, const RealField& phi) {
  const std::size_t n = grid.size();
  OneSided g;
  for (int j = 0; j < 3; ++j) {
    g.minus[j].resize(n);
    g.plus[j].resize(n);
  }
  const auto nn = grid.n();
  const auto dx = grid.spacing();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto m = grid.multi_index(i);
    for (int j = 0; j < 3; ++j) {
      auto at = [&](int shift) {
        auto mm = m;
        mm[j] = wrap(m[j] + shift, nn[j]);
        return phi[grid.index(mm[0], mm[1], mm[2])];
      };
      const double fm2 = at(-2), fm1 = at(-1), f0 = phi[i], fp1 = at(1), fp2 = at(2);
      const double d2m = fm2 - 2.0 * fm1 + f0;
      const double d20 = fm1 - 2.0 * f0 + fp1;
      const double d2p = f0 - 2.0 * fp1 + fp2;
      g.minus[j][i] = (f0 - fm1) / dx[j] + 0.5 * minmod(d2m, d20) / dx[j];
      g.plus[j][i] = (fp1 - f0) / dx[j] - 0.5 * minmod(d20, d2p) / dx[j];
    }
  }
  return g;
}

Vec3 lax_friedrichs_speeds(const OneSided& g, std::size_t n) {
  Vec3 a{0.0, 0.0, 0.0};
  for (int j = 0; j < 3; ++j) {
    a[j] = ordered_max(n, [&](std::size_t i) {
      const Vec3 pm{g.minus[0][i], g.minus[1][i], g.minus[2][i]};
      const Vec3 pp{g.plus[0][i], g.plus[1][i], g.plus[2][i]};
      return std::max(std::abs(pm[j]) / lambda0(pm), std::abs(pp[j]) / lambda0(pp));
    });
  }
  return a;
}

double stable_dt(const GridSpec& grid, const Vec3& a) {
  const double amax = std::max({a[0], a[1], a[2]});
  if (amax == 0.0) return std::numeric_limits<double>::infinity();
  const auto dx = grid.spacing();
  return std::min({dx[0], dx[1], dx[2]}) / (2.0 * amax);
}

double vdot_real(std::span<const Complex> a, std::span<const Complex> b) {
  return ordered_sum(a.size(), [&](std::size_t i) {
    return a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  });
}

bool all_zero(const SpinorField& u) {
  for (const auto& z : u.data) {
    if (z != Complex(0.0)) return false;
  }
  return true;
}

}  // namespace

double HamiltonianSpec::operator()(const Vec3& x, const Vec3& p) const {
  const double l = lambda0(p);
  return (sign == Sign::plus ? l : -l) + (v_ex ? v_ex(x) : 0.0);
}

RealField eiconal_rhs(const GridSpec& grid, const RealField& phi, const HamiltonianSpec& spec,
                      Vec3* speeds) {
  if (phi.size() != grid.size()) throw std::invalid_argument("eiconal_rhs: size mismatch");
  const std::size_t n = grid.size();
  const OneSided g = one_sided_gradients(grid, phi);
  const Vec3 a = lax_friedrichs_speeds(g, n);
  if (speeds != nullptr) *speeds = a;
  RealField out(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Vec3 mid;
    double dissipation = 0.0;
    for (int j = 0; j < 3; ++j) {
      mid[j] = 0.5 * (g.minus[j][i] + g.plus[j][i]);
      dissipation += 0.5 * a[j] * (g.plus[j][i] - g.minus[j][i]);
    }
    out[i] = -(spec(grid.point(i), mid) - dissipation);
  }
  return out;
}

double eiconal_max_dt(const GridSpec& grid, const RealField& phi, const HamiltonianSpec&) {
  const OneSided g = one_sided_gradients(grid, phi);
  return stable_dt(grid, lax_friedrichs_speeds(g, grid.size()));
}

RealField eiconal_step(const GridSpec& grid, const RealField& phi, double dt,
                       const HamiltonianSpec& spec) {
  Vec3 a;
  const RealField k1 = eiconal_rhs(grid, phi, spec, &a);
  const double limit = stable_dt(grid, a);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "eiconal_step: dt = " << dt << " exceeds the stability limit " << limit;
    throw CflError(msg.str());
  }
  const std::size_t n = phi.size();
  RealField tmp(n);
  auto stage = [&](const RealField& k, double c) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = phi[i] + c * k[i];
    return eiconal_rhs(grid, tmp, spec);
  };
  const RealField k2 = stage(k1, 0.5 * dt);
  const RealField k3 = stage(k2, 0.5 * dt);
  const RealField k4 = stage(k3, dt);
  RealField out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = phi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

std::array<RealField, 3> group_velocity(const Fft& fft, const RealField& phi, Sign sign) {
  auto w = spectral_gradient(fft, std::span<const double>(phi));
  const double s = sign == Sign::plus ? 1.0 : -1.0;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(phi.size()); ++i) {
    const Vec3 p{w[0][i], w[1][i], w[2][i]};
    const double f = s / lambda0(p);
    for (int j = 0; j < 3; ++j) w[j][i] = f * p[j];
  }
  return w;
}

WkbState::WkbState(const GridSpec& g)
    : phi_plus(g.size(), 0.0), phi_minus(g.size(), 0.0), u_plus(g), u_minus(g), fields(g) {}

Spinor polarized_chi(const Vec3& xi) {
  const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  if (k2 == 0.0) return {1.0, 0.0, 0.0, 0.0};
  // 1 / (2 (lambda - 1)) rewritten as (lambda + 1) / (2 |xi|^2).
  const double f = (lambda0(xi) + 1.0) / (2.0 * k2);
  const Complex z(xi[0], xi[1]);
  return {f * (xi[0] * xi[0] + xi[1] * xi[1]), -f * xi[2] * z, 0.0, 0.5 * z};
}

SpinorField polarized_amplitude(const Fft& fft, const RealField& phi_initial,
                                const PolarizedBase& base) {
  const GridSpec& grid = fft.grid();
  const auto grad = spectral_gradient(fft, std::span<const double>(phi_initial));
  SpinorField out(grid);
  const auto* custom = std::get_if<PolarizedCustom>(&base);
  if (custom != nullptr && !(custom->u_initial.grid == grid)) {
    throw std::invalid_argument("polarized_amplitude: grid mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(grid.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Vec3 xi{grad[0][i], grad[1][i], grad[2][i]};
    if (custom != nullptr) {
      out.set(i, apply_free_projector(xi, custom->sign, custom->u_initial.spinor(i)));
    } else {
      out.set(i, polarized_chi(xi));
    }
  }
  return out;
}

SpinorField wkb_reconstruct(const WkbState& state, double epsilon) {
  SpinorField out(state.u_plus.grid, state.time);
  const auto n = static_cast<std::ptrdiff_t>(out.points());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Complex ep = std::polar(1.0, state.phi_plus[i] / epsilon);
    const Complex em = std::polar(1.0, state.phi_minus[i] / epsilon);
    for (int c = 0; c < 4; ++c) out.at(i, c) = state.u_plus.at(i, c) * ep + state.u_minus.at(i, c) * em;
  }
  return out;
}

WkbSolver::WkbSolver(const GridSpec& grid, ExternalFields external, WkbOptions options)
    : grid_(grid), fft_(grid), external_(std::move(external)), options_(options) {
  if (external_.has_a()) {
    throw std::invalid_argument("WKB solver: external vector potentials are not supported");
  }
}

HamiltonianSpec WkbSolver::hamiltonian(Sign sign, double t) const {
  HamiltonianSpec h{sign, {}};
  if (external_.has_v()) {
    h.v_ex = [ext = external_.v_ex, t](const Vec3& x) { return ext(t, x); };
  }
  return h;
}

WkbState WkbSolver::initial_state(const RealField& phi_plus, const RealField& phi_minus,
                                  const SpinorField& u_plus, const SpinorField& u_minus) const {
  if (phi_plus.size() != grid_.size() || phi_minus.size() != grid_.size() ||
      !(u_plus.grid == grid_) || !(u_minus.grid == grid_)) {
    throw std::invalid_argument("WKB initial_state: grid mismatch");
  }
  WkbState s(grid_);
  s.phi_plus = phi_plus;
  s.phi_minus = phi_minus;
  s.u_plus = u_plus;
  s.u_minus = u_minus;
  return s;
}

void WkbSolver::apply_transport_operator(std::span<const Complex> u, std::span<Complex> out,
                                         const std::array<RealField, 3>& omega) const {
  const std::size_t n = grid_.size();
  const auto& ladder = fft_.ladder();
  ComplexField modes(u.begin(), u.end());
  fft_.forward(modes, 4);

  // omega . grad u
  ComplexField advect(4 * n, Complex(0.0));
  ComplexField work(4 * n);
  for (int j = 0; j < 3; ++j) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const Complex ik = kI * ladder.derivative_at(static_cast<std::size_t>(i))[j];
      for (int c = 0; c < 4; ++c) work[4 * i + c] = ik * modes[4 * i + c];
    }
    fft_.inverse(work, 4);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 4; ++c) advect[4 * i + c] += omega[j][i] * work[4 * i + c];
    }
  }

  // div(omega u)
  ComplexField div(4 * n, Complex(0.0));
  for (int j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 4; ++c) work[4 * i + c] = omega[j][i] * u[4 * i + c];
    }
    fft_.forward(work, 4);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const Complex ik = kI * ladder.derivative_at(static_cast<std::size_t>(i))[j];
      for (int c = 0; c < 4; ++c) div[4 * i + c] += ik * work[4 * i + c];
    }
  }
  fft_.inverse(div, 4);
  for (std::size_t k = 0; k < 4 * n; ++k) out[k] = -0.5 * (advect[k] + div[k]);
}

void WkbSolver::transport_cn(SpinorField& u, double dt,
                             const std::array<RealField, 3>& omega) const {
  // L is skew-adjoint, so A = I - (dt/2) L satisfies A^H = I + (dt/2) L and
  // A^H A = I - (dt^2/4) L^2 is Hermitian positive definite: plain CG on the
  // normal equations.
  const std::size_t len = u.data.size();
  const double h = 0.5 * dt;
  ComplexField lu(len), llu(len);
  auto apply_l = [&](std::span<const Complex> x, std::span<Complex> y) {
    apply_transport_operator(x, y, omega);
  };

  ComplexField b(len);
  apply_l(u.data, lu);
  for (std::size_t k = 0; k < len; ++k) b[k] = u.data[k] + h * lu[k];
  // rhs = A^H b
  ComplexField rhs(len);
  apply_l(b, lu);
  for (std::size_t k = 0; k < len; ++k) rhs[k] = b[k] + h * lu[k];

  auto normal = [&](std::span<const Complex> x, std::span<Complex> y) {
    apply_l(x, lu);
    apply_l(lu, llu);
    for (std::size_t k = 0; k < len; ++k) y[k] = x[k] - h * h * llu[k];
  };

  ComplexField x = b;
  ComplexField r(len), p(len), q(len);
  normal(x, q);
  for (std::size_t k = 0; k < len; ++k) r[k] = rhs[k] - q[k];
  const double rhs_norm = std::sqrt(vdot_real(rhs, rhs));
  double rr = vdot_real(r, r);
  const double target = options_.cg_tolerance * std::max(rhs_norm, 1e-300);
  p = r;
  int it = 0;
  while (std::sqrt(rr) > target && it < options_.cg_max_iterations) {
    normal(p, q);
    const double alpha = rr / vdot_real(p, q);
    for (std::size_t k = 0; k < len; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    const double rr_new = vdot_real(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < len; ++k) p[k] = r[k] + beta * p[k];
    ++it;
  }
  if (std::sqrt(rr) > 1e3 * target) {
    throw std::runtime_error("WKB transport: Crank-Nicolson solve did not converge");
  }
  u.data = std::move(x);
}

ComplexField WkbSolver::sources(const WkbState& state, const std::array<RealField, 3>& wp,
                                const std::array<RealField, 3>& wm) const {
  const std::size_t n = grid_.size();
  ComplexField src(4 * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double rp = 0.0, rm = 0.0;
    for (int c = 0; c < 4; ++c) {
      rp += std::norm(state.u_plus.at(i, c));
      rm += std::norm(state.u_minus.at(i, c));
    }
    src[4 * i] = rp + rm;
    for (int j = 0; j < 3; ++j) src[4 * i + 1 + j] = wp[j][i] * rp + wm[j][i] * rm;
  }
  fft_.forward(src, 4);
  return src;
}

void WkbSolver::transport_step1(WkbState& state, double dt, const std::array<RealField, 3>& wp,
                                const std::array<RealField, 3>& wm) const {
  ComplexField src = sources(state, wp, wm);
  if (!all_zero(state.u_plus)) transport_cn(state.u_plus, dt, wp);
  if (!all_zero(state.u_minus)) transport_cn(state.u_minus, dt, wm);
  const ComplexField src_new = sources(state, wp, wm);
  for (std::size_t k = 0; k < src.size(); ++k) src[k] += src_new[k];
  advance_potentials(fft_, state.fields, src, dt, 1.0, 1.0);
}

void WkbSolver::transport_step2(WkbState& state, double dt, const std::array<RealField, 3>& wp,
                                const std::array<RealField, 3>& wm) const {
  const auto& f = state.fields;
  const auto n = static_cast<std::ptrdiff_t>(grid_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double np = -f.v[i], nm = -f.v[i];
    for (int j = 0; j < 3; ++j) {
      np += f.a[j][i] * wp[j][i];
      nm += f.a[j][i] * wm[j][i];
    }
    const Complex rp = std::polar(1.0, np * dt);
    const Complex rm = std::polar(1.0, nm * dt);
    for (int c = 0; c < 4; ++c) {
      state.u_plus.at(i, c) *= rp;
      state.u_minus.at(i, c) *= rm;
    }
  }
}

void WkbSolver::advance_phases(WkbState& state, double dt) const {
  const HamiltonianSpec hp = hamiltonian(Sign::plus, state.time);
  const HamiltonianSpec hm = hamiltonian(Sign::minus, state.time);
  const double limit = std::min(eiconal_max_dt(grid_, state.phi_plus, hp),
                                eiconal_max_dt(grid_, state.phi_minus, hm));
  long sub = 1;
  if (std::isfinite(limit)) sub = std::max(1L, static_cast<long>(std::ceil(dt / (0.8 * limit))));
  const double h = dt / static_cast<double>(sub);
  for (long s = 0; s < sub; ++s) {
    state.phi_plus = eiconal_step(grid_, state.phi_plus, h, hp);
    state.phi_minus = eiconal_step(grid_, state.phi_minus, h, hm);
  }
}

bool WkbSolver::advance(WkbState& state, double dt) const {
  if (state.caustic) return false;
  const RealField old_plus = state.phi_plus;
  const RealField old_minus = state.phi_minus;
  advance_phases(state, dt);

  double worst = 0.0;
  for (const RealField* phi : {&state.phi_plus, &state.phi_minus}) {
    const Sign sign = phi == &state.phi_plus ? Sign::plus : Sign::minus;
    const RealField div = spectral_divergence(fft_, group_velocity(fft_, *phi, sign));
    worst = std::max(worst, ordered_max(div.size(), [&](std::size_t i) { return std::abs(div[i]); }));
  }
  if (!(worst <= options_.caustic_threshold)) {
    state.phi_plus = old_plus;
    state.phi_minus = old_minus;
    state.caustic = true;
    state.caustic_time = state.time + dt;
    state.max_div_omega = worst;
    return false;
  }
  state.max_div_omega = worst;

  RealField mid(old_plus.size());
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (old_plus[i] + state.phi_plus[i]);
  const auto wp = group_velocity(fft_, mid, Sign::plus);
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (old_minus[i] + state.phi_minus[i]);
  const auto wm = group_velocity(fft_, mid, Sign::minus);

  if (options_.splitting == Splitting::strang) {
    transport_step1(state, 0.5 * dt, wp, wm);
    transport_step2(state, dt, wp, wm);
    transport_step1(state, 0.5 * dt, wp, wm);
  } else {
    transport_step1(state, dt, wp, wm);
    transport_step2(state, dt, wp, wm);
  }
  state.time += dt;
  state.u_plus.time = state.u_minus.time = state.fields.time = state.time;
  return true;
}

}  // namespace mdkit
