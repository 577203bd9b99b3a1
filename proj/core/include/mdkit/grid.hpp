#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mdkit {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Periodic box [a_1,b_1) x [a_2,b_2) x [a_3,b_3) sampled at N_j points per
/// axis. Points are x_{j,m} = a_j + m * dx_j, m = 0..N_j-1. Storage order is
/// row-major over (m_1, m_2, m_3): x_3 varies fastest.
class GridSpec {
 public:
  GridSpec(const std::array<Interval, 3>& bounds, const std::array<int, 3>& n);

  const std::array<Interval, 3>& bounds() const { return bounds_; }
  const std::array<int, 3>& n() const { return n_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  double length(int axis) const { return bounds_[axis].upper - bounds_[axis].lower; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]) *
           static_cast<std::size_t>(n_[2]);
  }
  double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }

  std::size_t index(int m1, int m2, int m3) const {
    return (static_cast<std::size_t>(m1) * n_[1] + m2) * n_[2] + m3;
  }
  std::array<int, 3> multi_index(std::size_t idx) const {
    const int m3 = static_cast<int>(idx % n_[2]);
    const std::size_t rest = idx / n_[2];
    return {static_cast<int>(rest / n_[1]), static_cast<int>(rest % n_[1]), m3};
  }
  double coordinate(int axis, int m) const { return bounds_[axis].lower + m * spacing_[axis]; }
  Vec3 point(std::size_t idx) const {
    const auto m = multi_index(idx);
    return {coordinate(0, m[0]), coordinate(1, m[1]), coordinate(2, m[2])};
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.bounds_ == b.bounds_ && a.n_ == b.n_;
  }

 private:
  std::array<Interval, 3> bounds_;
  std::array<int, 3> n_;
  std::array<double, 3> spacing_;
};

GridSpec make_grid(const std::array<Interval, 3>& bounds, const std::array<int, 3>& n);
/// Same interval and count on every axis.
GridSpec make_cube(double lower, double upper, int n);

/// Standard DFT frequencies xi_j = 2 pi k_j / L_j with k_j in {-N_j/2, ..., N_j/2 - 1},
/// listed in FFT storage order (k = m for m < N/2, m - N otherwise).
class WavenumberLadder {
 public:
  explicit WavenumberLadder(const GridSpec& grid);

  int integer_mode(int axis, int m) const;
  double xi(int axis, int m) const { return xi_[axis][m]; }
  bool is_nyquist(int axis, int m) const { return 2 * m == n_[axis]; }

  /// Symbol for multiplication (projectors, propagators): Nyquist kept as stored.
  Vec3 at(std::size_t idx) const {
    const std::size_t n23 = static_cast<std::size_t>(n_[1]) * n_[2];
    const int m1 = static_cast<int>(idx / n23);
    const int m2 = static_cast<int>((idx / n_[2]) % n_[1]);
    const int m3 = static_cast<int>(idx % n_[2]);
    return {xi_[0][m1], xi_[1][m2], xi_[2][m3]};
  }
  double norm2(std::size_t idx) const {
    const Vec3 x = at(idx);
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  }
  /// Symbol for first derivatives: Nyquist components zeroed so real fields stay real.
  Vec3 derivative_at(std::size_t idx) const {
    const std::size_t n23 = static_cast<std::size_t>(n_[1]) * n_[2];
    const int m1 = static_cast<int>(idx / n23);
    const int m2 = static_cast<int>((idx / n_[2]) % n_[1]);
    const int m3 = static_cast<int>(idx % n_[2]);
    return {dxi_[0][m1], dxi_[1][m2], dxi_[2][m3]};
  }
  /// True when |k_j| <= N_j / 3 on every axis (2/3-rule retained set).
  bool in_two_thirds(std::size_t idx) const;

  std::size_t size() const {
    return static_cast<std::size_t>(n_[0]) * n_[1] * static_cast<std::size_t>(n_[2]);
  }

 private:
  std::array<int, 3> n_;
  std::array<std::vector<double>, 3> xi_;
  std::array<std::vector<double>, 3> dxi_;
};

}  // namespace mdkit
