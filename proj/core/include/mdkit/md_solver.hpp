#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mdkit/dirac.hpp"
#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"

namespace mdkit {

struct MdState {
  SpinorField psi;
  PotentialState pot;
  long step_index = 0;

  double time() const { return psi.time; }
};

enum class PotentialInit { zero, poisson };

PotentialInit parse_potential_init(std::string_view name);
std::string_view to_string(PotentialInit p);

/// (|psi|^2, <psi, alpha^1 psi>, <psi, alpha^2 psi>, <psi, alpha^3 psi>) at one point.
std::array<double, 4> charge_current(const Spinor& s);

/// Initial potentials. `poisson` solves -Laplace V = eps rho and
/// -Laplace A_k = eps delta J_k with the mean mode removed; dV/dt is then
/// chosen so delta dV/dt + div A = 0 holds mode by mode, and dA/dt = 0.
/// A note is appended to `warnings` when the removed mean is larger than
/// `warn_fraction` of the source's l2 norm.
PotentialState gauge_consistent_init(const Fft& fft, const SpinorField& psi0, const SimConfig& cfg,
                                     PotentialInit v0, PotentialInit a0,
                                     std::vector<std::string>* warnings = nullptr,
                                     double warn_fraction = 0.05);

/// Time-splitting spectral integrator for the coupled Dirac / wave system.
/// Step 1 is the free Dirac flow (exact per mode) together with a
/// Crank-Nicolson update of V and A; step 2 is the pointwise potential
/// rotation. Not safe to share between threads; independent instances are.
class MdSolver {
 public:
  explicit MdSolver(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const Fft& fft() const { return fft_; }

  MdState initial_state(const SpinorField& psi0, PotentialInit v0, PotentialInit a0,
                        std::vector<std::string>* warnings = nullptr,
                        double warn_fraction = 0.05) const;

  void step1(MdState& state, double dt);
  void step2(SpinorField& psi, const PotentialState& pot, double dt, double t_eval) const;
  /// One full step of cfg.dt with the configured splitting.
  void advance(MdState& state);

  /// Symbol table for a given substep length (cached).
  const DiracSymbolTables& tables(double dt);

 private:
  ComplexField sources(const SpinorField& psi) const;

  SimConfig cfg_;
  Fft fft_;
  std::vector<std::unique_ptr<DiracSymbolTables>> cache_;
};

}  // namespace mdkit
