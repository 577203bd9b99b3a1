#pragma once

#include <functional>
#include <stdexcept>
#include <variant>

#include "mdkit/dirac.hpp"
#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"

namespace mdkit {

/// h(x, p) = +-sqrt(|p|^2 + 1) + v_ex(x).
struct HamiltonianSpec {
  Sign sign = Sign::plus;
  std::function<double(const Vec3&)> v_ex;

  double operator()(const Vec3& x, const Vec3& p) const;
};

class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// -H(x, p-, p+) for the local Lax-Friedrichs Hamiltonian built from
/// minmod-limited one-sided differences. `speeds` receives the a_j used.
RealField eiconal_rhs(const GridSpec& grid, const RealField& phi, const HamiltonianSpec& spec,
                      Vec3* speeds = nullptr);
/// Largest RK4 step allowed by dt <= min dx / (2 max a_j); infinity when a == 0.
double eiconal_max_dt(const GridSpec& grid, const RealField& phi, const HamiltonianSpec& spec);
/// One classical RK4 step; throws CflError if dt exceeds eiconal_max_dt.
RealField eiconal_step(const GridSpec& grid, const RealField& phi, double dt,
                       const HamiltonianSpec& spec);

/// omega = +-p / lambda0(p) with p = grad phi (spectral).
std::array<RealField, 3> group_velocity(const Fft& fft, const RealField& phi, Sign sign);

struct WkbState {
  RealField phi_plus;
  RealField phi_minus;
  SpinorField u_plus;
  SpinorField u_minus;
  /// Self-consistent fields (V, dV/dt, A, dA/dt) in the same layout as MD potentials.
  PotentialState fields;
  double time = 0.0;
  bool caustic = false;
  double caustic_time = 0.0;
  /// Largest |div omega| seen on the last accepted step.
  double max_div_omega = 0.0;

  explicit WkbState(const GridSpec& g);
};

struct WkbOptions {
  double caustic_threshold = 50.0;
  double cg_tolerance = 1e-14;
  int cg_max_iterations = 500;
  Splitting splitting = Splitting::strang;
};

/// Polarized amplitude chi(grad phi), or a custom amplitude projected pointwise.
struct PolarizedExample {};
struct PolarizedCustom {
  SpinorField u_initial;
  Sign sign = Sign::plus;
};
using PolarizedBase = std::variant<PolarizedExample, PolarizedCustom>;

SpinorField polarized_amplitude(const Fft& fft, const RealField& phi_initial,
                                const PolarizedBase& base);
/// chi(xi) with the removable singularity at xi -> 0 resolved.
Spinor polarized_chi(const Vec3& xi);

/// u+ exp(i phi+/eps) + u- exp(i phi-/eps).
SpinorField wkb_reconstruct(const WkbState& state, double epsilon);

/// Co-advances phases (RK4, substepped for stability) and amplitudes
/// (Crank-Nicolson transport + pointwise nonlinear phase).
class WkbSolver {
 public:
  WkbSolver(const GridSpec& grid, ExternalFields external, WkbOptions options = {});

  const Fft& fft() const { return fft_; }
  const WkbOptions& options() const { return options_; }

  /// Given phases and amplitudes at t = 0 with zero self-consistent fields.
  WkbState initial_state(const RealField& phi_plus, const RealField& phi_minus,
                         const SpinorField& u_plus, const SpinorField& u_minus) const;

  /// Advances the amplitudes of both branches and the fields with frozen velocities.
  void transport_step1(WkbState& state, double dt, const std::array<RealField, 3>& omega_plus,
                       const std::array<RealField, 3>& omega_minus) const;
  void transport_step2(WkbState& state, double dt, const std::array<RealField, 3>& omega_plus,
                       const std::array<RealField, 3>& omega_minus) const;
  void advance_phases(WkbState& state, double dt) const;
  /// One full step. Returns false (and sets state.caustic) when the
  /// div-omega threshold is crossed; the state is then left at the old time.
  bool advance(WkbState& state, double dt) const;

  HamiltonianSpec hamiltonian(Sign sign, double t) const;

 private:
  /// Crank-Nicolson for du/dt = L u, L = -(1/2)(div(omega .) + omega . grad).
  void transport_cn(SpinorField& u, double dt, const std::array<RealField, 3>& omega) const;
  void apply_transport_operator(std::span<const Complex> u, std::span<Complex> out,
                                const std::array<RealField, 3>& omega) const;
  ComplexField sources(const WkbState& state, const std::array<RealField, 3>& omega_plus,
                       const std::array<RealField, 3>& omega_minus) const;

  GridSpec grid_;
  Fft fft_;
  ExternalFields external_;
  WkbOptions options_;
};

}  // namespace mdkit
