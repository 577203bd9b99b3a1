#include "mdkit/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mdkit {

GridSpec::GridSpec(const std::array<Interval, 3>& bounds, const std::array<int, 3>& n)
    : bounds_(bounds), n_(n) {
  for (int j = 0; j < 3; ++j) {
    if (n_[j] < 2 || n_[j] % 2 != 0) {
      throw GridError("grid axis " + std::to_string(j + 1) + ": mode count " +
                      std::to_string(n_[j]) + " must be even and >= 2");
    }
    if (!(bounds_[j].lower < bounds_[j].upper) || !std::isfinite(bounds_[j].lower) ||
        !std::isfinite(bounds_[j].upper)) {
      throw GridError("grid axis " + std::to_string(j + 1) + ": bounds must satisfy a < b");
    }
    spacing_[j] = (bounds_[j].upper - bounds_[j].lower) / n_[j];
  }
}

GridSpec make_grid(const std::array<Interval, 3>& bounds, const std::array<int, 3>& n) {
  return GridSpec(bounds, n);
}

GridSpec make_cube(double lower, double upper, int n) {
  const Interval iv{lower, upper};
  return GridSpec({iv, iv, iv}, {n, n, n});
}

WavenumberLadder::WavenumberLadder(const GridSpec& grid) : n_(grid.n()) {
  for (int j = 0; j < 3; ++j) {
    const double base = 2.0 * std::numbers::pi / grid.length(j);
    xi_[j].resize(n_[j]);
    dxi_[j].resize(n_[j]);
    for (int m = 0; m < n_[j]; ++m) {
      xi_[j][m] = base * integer_mode(j, m);
      dxi_[j][m] = is_nyquist(j, m) ? 0.0 : xi_[j][m];
    }
  }
}

int WavenumberLadder::integer_mode(int axis, int m) const {
  return m < n_[axis] / 2 ? m : m - n_[axis];
}

bool WavenumberLadder::in_two_thirds(std::size_t idx) const {
  const std::size_t n23 = static_cast<std::size_t>(n_[1]) * n_[2];
  const int m[3] = {static_cast<int>(idx / n23), static_cast<int>((idx / n_[2]) % n_[1]),
                    static_cast<int>(idx % n_[2])};
  for (int j = 0; j < 3; ++j) {
    if (3 * std::abs(integer_mode(j, m[j])) > n_[j]) return false;
  }
  return true;
}

}  // namespace mdkit
