#include "mdkit/sp_solver.hpp"

#include <cmath>

#include "mdkit/dirac.hpp"
#include "mdkit/parallel.hpp"

namespace mdkit {

double total_charge(const SpState& s) { return total_charge(s.phi_e) + total_charge(s.phi_p); }

SpSolver::SpSolver(const GridSpec& grid, ExternalFields external, SpOptions options)
    : grid_(grid), fft_(grid), external_(std::move(external)), options_(options) {}

SpState SpSolver::initial_state(const SpinorField& psi0, double delta) const {
  if (!(psi0.grid == grid_)) throw std::invalid_argument("SP initial_state: grid mismatch");
  SpState s(grid_);
  NrSplit split = nr_projector_split(fft_, psi0, delta, 0.0);
  s.phi_e = std::move(split.electronic);
  s.phi_p = std::move(split.positronic);
  s.time = psi0.time;
  s.phi_e.time = s.phi_p.time = s.time;
  update_potential(s);
  return s;
}

void SpSolver::update_potential(SpState& state) const {
  if (!options_.self_potential) {
    std::fill(state.v.begin(), state.v.end(), 0.0);
    return;
  }
  RealField rho(grid_.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double r = 0.0;
    for (int c = 0; c < 4; ++c) r += std::norm(state.phi_e.at(i, c)) + std::norm(state.phi_p.at(i, c));
    rho[i] = r;
  }
  state.v = solve_poisson(fft_, rho);
}

void SpSolver::step1(SpState& state, double dt) const {
  const auto& ladder = fft_.ladder();
  fft_.forward(state.phi_e.data, 4);
  fft_.forward(state.phi_p.data, 4);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(ladder.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Complex e = std::polar(1.0, -0.5 * ladder.norm2(i) * dt);
    const Complex p = std::conj(e);
    for (int c = 0; c < 4; ++c) {
      state.phi_e.at(i, c) *= e;
      state.phi_p.at(i, c) *= p;
    }
  }
  fft_.inverse(state.phi_e.data, 4);
  fft_.inverse(state.phi_p.data, 4);
  update_potential(state);
}

void SpSolver::step2(SpState& state, double dt, double t_eval) const {
  const bool has_v = external_.has_v();
  const auto n = static_cast<std::ptrdiff_t>(grid_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double w = state.v[i];
    if (has_v) w += external_.v_ex(t_eval, grid_.point(i));
    const Complex r = std::polar(1.0, -w * dt);
    for (int c = 0; c < 4; ++c) {
      state.phi_e.at(i, c) *= r;
      state.phi_p.at(i, c) *= r;
    }
  }
}

void SpSolver::advance(SpState& state, double dt) const {
  const double t0 = state.time;
  if (options_.splitting == Splitting::strang) {
    step1(state, 0.5 * dt);
    step2(state, dt, t0 + 0.5 * dt);
    step1(state, 0.5 * dt);
  } else {
    step1(state, dt);
    step2(state, dt, t0 + dt);
  }
  state.time = t0 + dt;
  state.phi_e.time = state.phi_p.time = state.time;
}

}  // namespace mdkit
