#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mdkit/dirac.hpp"
#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"

namespace mdkit {

/// Shortest decimal text that reads back to the same double; "nan" / "inf" / "-inf".
std::string format_double(double x);

/// Rows of (t, charge, gauge_residual, l2_error, linf_error, extras...).
/// Missing values are stored as NaN and written as "nan".
class TimeSeries {
 public:
  struct Row {
    double t = 0.0;
    double charge = 0.0;
    double gauge_residual = 0.0;
    double l2_error = 0.0;
    double linf_error = 0.0;
    std::vector<double> extra;
  };

  explicit TimeSeries(std::vector<std::string> extra_names = {});

  /// Throws std::invalid_argument unless t is strictly larger than the last row's t.
  void add(Row row);
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<std::string>& extra_names() const { return extra_names_; }

  void write_csv(std::ostream& os) const;
  static TimeSeries read_csv(std::istream& is);

 private:
  std::vector<std::string> extra_names_;
  std::vector<Row> rows_;
};

struct PlaneWave {
  SpinorField psi;
  PotentialState pot;
};

/// xi0 = 2 pi k / L for integer k on the grid's box.
Vec3 plane_wave_wavenumber(const GridSpec& grid, const std::array<int, 3>& k);

/// Exact plane-wave solution with V = t^2/2, A = t^2 xi/(2 lambda). Throws
/// GridError when xi0 is not a lattice wavenumber of the box, or when it
/// lies outside the grid's resolved band unless allow_aliased is set.
PlaneWave exact_plane_wave(double t, const GridSpec& grid, const Vec3& xi0,
                           bool allow_aliased = false);
/// The external fields that make the plane wave an exact solution:
/// V_ex = -t^2/2, A_ex = -t^2 xi/(2 lambda).
ExternalFields plane_wave_external(const Vec3& xi0);

/// max over xi != 0 of |delta dV/dt^ + i xi . A^| / max(1, max |V^|), with
/// hats the normalized Fourier coefficients (forward DFT / point count).
double gauge_residual(const Fft& fft, const PotentialState& pot, double delta);

struct ErrorNorms {
  double l2_rel = 0.0;
  double linf_abs = 0.0;
};

/// ||a - b|| / ||b|| in the discrete l2 norm and max_x |a(x) - b(x)|.
/// l2_rel is +infinity when b vanishes and a does not (0 when both do).
ErrorNorms error_norms(const SpinorField& a, const SpinorField& b);

/// Discrete l2 norm sqrt(sum |psi|^2 dx).
double l2_norm(const SpinorField& psi);

/// max_x (|a_e - b_e|^2 + |a_p - b_p|^2).
double projected_difference(const SpinorField& a_e, const SpinorField& a_p,
                            const SpinorField& b_e, const SpinorField& b_p);

/// Pointwise |Pi(psi)|^2.
RealField projector_density(const Fft& fft, const SpinorField& psi, Sign sign,
                            const ProjectorMode& mode);

/// Rectangle-rule integral of a scalar field.
double integrate(const GridSpec& grid, const RealField& f);

/// log2(e[i] / e[i+1]) for successive halvings.
std::vector<double> convergence_orders(const std::vector<double>& errors);

}  // namespace mdkit
