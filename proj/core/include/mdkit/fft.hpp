#pragma once

#include <array>
#include <memory>
#include <span>

#include "mdkit/grid.hpp"

namespace mdkit {

/// In-place 3-D complex DFT on a GridSpec, for fields of 1, 3 or 4
/// interleaved components (component index fastest).
///
/// Convention (fixed project-wide): forward is unnormalized with kernel
/// exp(-i xi.x); inverse carries 1/(N1 N2 N3), so inverse(forward(f)) == f.
class Fft {
 public:
  explicit Fft(const GridSpec& grid);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  const GridSpec& grid() const { return grid_; }
  const WavenumberLadder& ladder() const { return ladder_; }

  void forward(std::span<Complex> data, int components = 1) const;
  void inverse(std::span<Complex> data, int components = 1) const;

 private:
  struct Plans;
  void execute(std::span<Complex> data, int components, bool forward) const;

  GridSpec grid_;
  WavenumberLadder ladder_;
  std::unique_ptr<Plans> plans_;
};

/// Forward transform of a scalar field (unnormalized).
ComplexField dft(const Fft& fft, std::span<const Complex> field);
ComplexField dft(const Fft& fft, std::span<const double> field);
/// Normalized inverse transform.
ComplexField idft(const Fft& fft, std::span<const Complex> modes);

/// Component j is idft(i xi_j dft(f)), Nyquist derivative symbol zeroed.
std::array<RealField, 3> spectral_gradient(const Fft& fft, std::span<const double> field);
std::array<ComplexField, 3> spectral_gradient(const Fft& fft, std::span<const Complex> field);
/// Spectral divergence of a real vector field.
RealField spectral_divergence(const Fft& fft, const std::array<RealField, 3>& field);

/// Solves -Laplace(u) = scale * (source - mean(source)) with zero-mean u.
RealField solve_poisson(const Fft& fft, std::span<const double> source, double scale = 1.0);

}  // namespace mdkit
