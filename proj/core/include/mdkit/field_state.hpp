#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>

#include "mdkit/grid.hpp"

namespace mdkit {

using Spinor = std::array<Complex, 4>;

/// Four complex components per grid point, interleaved (component fastest).
struct SpinorField {
  GridSpec grid;
  ComplexField data;
  double time = 0.0;

  explicit SpinorField(const GridSpec& g, double t = 0.0) : grid(g), data(4 * g.size()), time(t) {}

  std::size_t points() const { return grid.size(); }
  Complex& at(std::size_t point, int component) { return data[4 * point + component]; }
  const Complex& at(std::size_t point, int component) const { return data[4 * point + component]; }
  Spinor spinor(std::size_t point) const {
    return {data[4 * point], data[4 * point + 1], data[4 * point + 2], data[4 * point + 3]};
  }
  void set(std::size_t point, const Spinor& s) {
    for (int c = 0; c < 4; ++c) data[4 * point + c] = s[c];
  }
};

/// Self-consistent potentials V, dV/dt, A, dA/dt sampled on a common grid.
struct PotentialState {
  GridSpec grid;
  RealField v;
  RealField v_t;
  std::array<RealField, 3> a;
  std::array<RealField, 3> a_t;
  double time = 0.0;

  explicit PotentialState(const GridSpec& g, double t = 0.0);
};

/// External potentials. An empty function means the field vanishes
/// identically, which lets solvers skip its evaluation.
struct ExternalFields {
  std::function<double(double t, const Vec3& x)> v_ex;
  std::function<Vec3(double t, const Vec3& x)> a_ex;

  bool has_v() const { return static_cast<bool>(v_ex); }
  bool has_a() const { return static_cast<bool>(a_ex); }
  double v(double t, const Vec3& x) const { return v_ex ? v_ex(t, x) : 0.0; }
  Vec3 a(double t, const Vec3& x) const { return a_ex ? a_ex(t, x) : Vec3{0.0, 0.0, 0.0}; }
};

enum class Splitting { first_order, strang };

Splitting parse_splitting(std::string_view name);
std::string_view to_string(Splitting s);

struct SimConfig {
  double epsilon = 1.0;
  double delta = 1.0;
  double dt = 1.0 / 128.0;
  double t_final = 1.0;
  GridSpec grid = make_cube(-0.5, 0.5, 32);
  ExternalFields external;
  Splitting splitting = Splitting::strang;
  /// 2/3-rule truncation of the wave-equation sources (off by default).
  bool dealias = false;

  /// Number of whole steps M = T / dt; throws if dt does not divide T.
  long steps() const;
  /// Throws std::invalid_argument on any invariant violation.
  void validate() const;
};

/// chi(x) exp(-|x - center|^2 / (4 width^2)) exp(i phase(x) / epsilon).
SpinorField gaussian_spinor(const GridSpec& grid, const Vec3& center, double width,
                            const std::function<Spinor(const Vec3&)>& chi,
                            const std::function<double(const Vec3&)>& phase, double epsilon);
SpinorField gaussian_spinor(const GridSpec& grid, const Vec3& center, double width,
                            const Spinor& chi,
                            const std::function<double(const Vec3&)>& phase, double epsilon);

/// Rectangle-rule charge sum |psi|^2 dx1 dx2 dx3.
double total_charge(const SpinorField& psi);

}  // namespace mdkit
