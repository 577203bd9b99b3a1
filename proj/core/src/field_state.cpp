#include "mdkit/field_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdkit/parallel.hpp"

namespace mdkit {

PotentialState::PotentialState(const GridSpec& g, double t)
    : grid(g), v(g.size(), 0.0), v_t(g.size(), 0.0), time(t) {
  for (int k = 0; k < 3; ++k) {
    a[k].assign(g.size(), 0.0);
    a_t[k].assign(g.size(), 0.0);
  }
}

Splitting parse_splitting(std::string_view name) {
  if (name == "strang") return Splitting::strang;
  if (name == "first_order") return Splitting::first_order;
  throw std::invalid_argument("unknown splitting '" + std::string(name) + "'");
}

std::string_view to_string(Splitting s) {
  return s == Splitting::strang ? "strang" : "first_order";
}

long SimConfig::steps() const {
  const double ratio = t_final / dt;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, m)) {
    throw std::invalid_argument("time step " + std::to_string(dt) +
                                " does not divide final time " + std::to_string(t_final));
  }
  return static_cast<long>(m);
}

void SimConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be non-negative");
  (void)steps();
}

SpinorField gaussian_spinor(const GridSpec& grid, const Vec3& center, double width,
                            const std::function<Spinor(const Vec3&)>& chi,
                            const std::function<double(const Vec3&)>& phase, double epsilon) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_spinor: width must be positive");
  SpinorField psi(grid);
  const double inv = 1.0 / (4.0 * width * width);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    const Vec3 x = grid.point(static_cast<std::size_t>(p));
    double r2 = 0.0;
    for (int j = 0; j < 3; ++j) r2 += (x[j] - center[j]) * (x[j] - center[j]);
    Complex envelope = std::exp(-r2 * inv);
    if (phase) envelope *= std::polar(1.0, phase(x) / epsilon);
    const Spinor c = chi(x);
    for (int k = 0; k < 4; ++k) psi.at(static_cast<std::size_t>(p), k) = c[k] * envelope;
  }
  return psi;
}

SpinorField gaussian_spinor(const GridSpec& grid, const Vec3& center, double width,
                            const Spinor& chi,
                            const std::function<double(const Vec3&)>& phase, double epsilon) {
  return gaussian_spinor(
      grid, center, width, [&chi](const Vec3&) { return chi; }, phase, epsilon);
}

double total_charge(const SpinorField& psi) {
  const double sum = ordered_sum(psi.data.size(), [&](std::size_t i) { return std::norm(psi.data[i]); });
  return sum * psi.grid.cell_volume();
}

}  // namespace mdkit
