#pragma once

#include <array>
#include <span>
#include <variant>

#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"

namespace mdkit {

/// Dense complex 4x4 matrix, row-major.
struct Mat4 {
  std::array<Complex, 16> m{};

  Complex& operator()(int r, int c) { return m[4 * r + c]; }
  const Complex& operator()(int r, int c) const { return m[4 * r + c]; }

  static Mat4 identity();
  Mat4 adjoint() const;
  Mat4 operator*(const Mat4& b) const;
  Mat4 operator+(const Mat4& b) const;
  Mat4 operator-(const Mat4& b) const;
  Mat4 operator*(Complex s) const;
  Spinor operator*(const Spinor& v) const;
  /// Largest entry modulus.
  double max_abs() const;
};

enum class Sign { plus, minus };

/// Dirac matrices in the standard representation: beta = diag(I2, -I2),
/// alpha^k = [[0, sigma^k], [sigma^k, 0]].
Mat4 dirac_alpha(int k);
Mat4 dirac_beta();

/// sqrt(|xi|^2 + 1).
double lambda0(const Vec3& xi);
/// alpha.xi + beta.
Mat4 dirac_symbol(const Vec3& xi);
/// Applies (alpha.xi + beta) to a spinor without forming the matrix.
Spinor apply_dirac_symbol(const Vec3& xi, const Spinor& v);
/// Applies alpha.a (no beta term).
Spinor apply_alpha_dot(const Vec3& a, const Spinor& v);

/// (1/2)(I +- (alpha.xi + beta) / lambda0(xi)).
Mat4 free_projector(const Vec3& xi, Sign sign);
Spinor apply_free_projector(const Vec3& xi, Sign sign, const Spinor& v);

/// Exact per-mode flow of i eps dPhi/dt = delta^-2 D0(eps delta xi) Phi over dt:
/// cos(theta) I - i sin(theta) (eps delta alpha.xi + beta) / lambda0(eps delta xi),
/// theta = dt lambda0(eps delta xi) / (eps delta^2).
Mat4 step1_propagator(const Vec3& xi, double dt, double epsilon, double delta);

/// Per-mode propagator coefficients for one (dt, epsilon, delta) triple. Stored
/// compactly as (cos theta, sin theta / lambda0); the 4x4 is rebuilt on demand.
class DiracSymbolTables {
 public:
  DiracSymbolTables(const WavenumberLadder& ladder, double dt, double epsilon, double delta);

  double dt() const { return dt_; }
  double scale() const { return scale_; }
  /// lambda0(scale * xi) for mode idx, scale = epsilon * delta.
  double lambda0_at(std::size_t idx) const { return lambda_[idx]; }
  Mat4 propagator(std::size_t idx) const;
  /// v <- P(xi_idx) v.
  void apply(std::size_t idx, Spinor& v) const;
  /// Applies the propagator to every mode of a transformed spinor field.
  void apply_all(std::span<Complex> spinor_modes) const;

 private:
  const WavenumberLadder* ladder_;
  double dt_;
  double scale_;
  std::vector<double> lambda_;
  std::vector<double> cos_;
  std::vector<double> sin_over_lambda_;
};

/// Pi0(-i s grad) applied through its symbol at s*xi.
struct SpectralProjection {
  double scale = 1.0;
};
/// Pointwise Pi0(grad phi(x)).
struct PhaseGradientProjection {
  RealField phi;
};
using ProjectorMode = std::variant<SpectralProjection, PhaseGradientProjection>;

SpinorField apply_projector(const Fft& fft, const SpinorField& psi, Sign sign,
                            const ProjectorMode& mode);

struct NrSplit {
  SpinorField electronic;
  SpinorField positronic;
};

/// psi_e = exp(+i t/delta^2) Pi_e^delta(D) psi, psi_p = exp(-i t/delta^2) Pi_p^delta(D) psi.
/// delta must be positive; see nr_projector_limit for the formal delta -> 0 projectors.
NrSplit nr_projector_split(const Fft& fft, const SpinorField& psi, double delta, double t);
/// Formal limit projectors diag(I2, 0) and diag(0, I2); no rest-energy phase.
NrSplit nr_projector_limit(const SpinorField& psi);

}  // namespace mdkit
