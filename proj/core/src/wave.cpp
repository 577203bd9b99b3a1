#include "mdkit/wave.hpp"

#include <stdexcept>

namespace mdkit {

void crank_nicolson_wave(const WavenumberLadder& ladder, std::span<Complex> x,
                         std::span<Complex> x_t, std::span<const Complex> source_sum,
                         double dt, double delta, double coupling, int components) {
  const std::size_t n = ladder.size() * static_cast<std::size_t>(components);
  if (x.size() != n || x_t.size() != n || source_sum.size() != n) {
    throw std::invalid_argument("crank_nicolson_wave: size mismatch");
  }
  const double d2 = delta * delta;
  const double s0 = coupling * dt * dt / (4.0 * d2);
  const double s1 = coupling * dt / (2.0 * d2);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ladder.size()); ++i) {
    const double k2 = ladder.norm2(static_cast<std::size_t>(i));
    const double a = dt * dt * k2 / (4.0 * d2);
    const double inv = 1.0 / (1.0 + a);
    const double b = dt * k2 / d2;
    for (int c = 0; c < components; ++c) {
      const std::size_t j = static_cast<std::size_t>(i) * components + c;
      const Complex u = x[j];
      const Complex ut = x_t[j];
      const Complex s = source_sum[j];
      x[j] = ((1.0 - a) * u + dt * ut + s0 * s) * inv;
      x_t[j] = (-b * u + (1.0 - a) * ut + s1 * s) * inv;
    }
  }
}

void advance_potentials(const Fft& fft, PotentialState& pot, std::span<const Complex> source_sum,
                        double dt, double delta, double coupling) {
  const std::size_t n = pot.grid.size();
  ComplexField x(4 * n), xt(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[4 * i] = pot.v[i];
    xt[4 * i] = pot.v_t[i];
    for (int k = 0; k < 3; ++k) {
      x[4 * i + 1 + k] = pot.a[k][i];
      xt[4 * i + 1 + k] = pot.a_t[k][i];
    }
  }
  fft.forward(x, 4);
  fft.forward(xt, 4);
  crank_nicolson_wave(fft.ladder(), x, xt, source_sum, dt, delta, coupling, 4);
  fft.inverse(x, 4);
  fft.inverse(xt, 4);
  for (std::size_t i = 0; i < n; ++i) {
    pot.v[i] = x[4 * i].real();
    pot.v_t[i] = xt[4 * i].real();
    for (int k = 0; k < 3; ++k) {
      pot.a[k][i] = x[4 * i + 1 + k].real();
      pot.a_t[k][i] = xt[4 * i + 1 + k].real();
    }
  }
}

}  // namespace mdkit
