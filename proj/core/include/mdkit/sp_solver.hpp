#pragma once

#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"

namespace mdkit {

/// Electronic / positronic Schroedinger fields and their Poisson potential.
struct SpState {
  SpinorField phi_e;
  SpinorField phi_p;
  RealField v;
  double time = 0.0;

  explicit SpState(const GridSpec& g) : phi_e(g), phi_p(g), v(g.size(), 0.0) {}
};

struct SpOptions {
  /// When false V stays zero (free or externally driven flow only).
  bool self_potential = true;
  Splitting splitting = Splitting::strang;
};

double total_charge(const SpState& s);

class SpSolver {
 public:
  SpSolver(const GridSpec& grid, ExternalFields external, SpOptions options = {});

  const Fft& fft() const { return fft_; }

  /// phi_e = Pi_e^delta psi0, phi_p = Pi_p^delta psi0 and the matching V.
  SpState initial_state(const SpinorField& psi0, double delta) const;

  /// Kinetic flow exp(-+ i |xi|^2 dt / 2), then V from the new densities.
  void step1(SpState& state, double dt) const;
  /// phi <- exp(-i (V + V_ex(t_eval)) dt) phi for both fields.
  void step2(SpState& state, double dt, double t_eval) const;
  void advance(SpState& state, double dt) const;
  /// V with -Laplace V = |phi_e|^2 + |phi_p|^2 - mean, zero mean.
  void update_potential(SpState& state) const;

 private:
  GridSpec grid_;
  Fft fft_;
  ExternalFields external_;
  SpOptions options_;
};

}  // namespace mdkit
