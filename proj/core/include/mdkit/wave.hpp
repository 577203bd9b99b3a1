#pragma once

#include <span>

#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"
#include "mdkit/grid.hpp"

namespace mdkit {

/// Crank-Nicolson step of (delta^2 d_tt + |xi|^2) X = c S per Fourier mode.
/// `source_sum` holds S^n + S^{n+1}. x and x_t are updated in place; all
/// spans share the ladder's mode ordering and may carry `components`
/// interleaved values per mode.
void crank_nicolson_wave(const WavenumberLadder& ladder, std::span<Complex> x,
                         std::span<Complex> x_t, std::span<const Complex> source_sum,
                         double dt, double delta, double coupling, int components = 1);

/// Packs (V, A) and (dV/dt, dA/dt), transforms, applies crank_nicolson_wave
/// with the given 4-component source modes (rho, J1, J2, J3 summed over the
/// two time levels) and writes the real parts back.
void advance_potentials(const Fft& fft, PotentialState& pot, std::span<const Complex> source_sum,
                        double dt, double delta, double coupling);

}  // namespace mdkit
