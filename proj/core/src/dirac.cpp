#include "mdkit/dirac.hpp"

#include <cmath>
#include <stdexcept>

namespace mdkit {

namespace {
constexpr Complex kI{0.0, 1.0};

// sigma.a acting on a two-spinor (w0, w1).
inline void sigma_dot(const Vec3& a, Complex w0, Complex w1, Complex& r0, Complex& r1) {
  r0 = a[2] * w0 + Complex(a[0], -a[1]) * w1;
  r1 = Complex(a[0], a[1]) * w0 - a[2] * w1;
}
}  // namespace

Mat4 Mat4::identity() {
  Mat4 r;
  for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
  return r;
}

Mat4 Mat4::adjoint() const {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

Mat4 Mat4::operator*(const Mat4& b) const {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < 4; ++k) s += (*this)(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat4 Mat4::operator+(const Mat4& b) const {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.m[i] = m[i] + b.m[i];
  return r;
}

Mat4 Mat4::operator-(const Mat4& b) const {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.m[i] = m[i] - b.m[i];
  return r;
}

Mat4 Mat4::operator*(Complex s) const {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.m[i] = m[i] * s;
  return r;
}

Spinor Mat4::operator*(const Spinor& v) const {
  Spinor r{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) r[i] += (*this)(i, k) * v[k];
  return r;
}

double Mat4::max_abs() const {
  double best = 0.0;
  for (const auto& z : m) best = std::max(best, std::abs(z));
  return best;
}

Mat4 dirac_beta() {
  Mat4 b;
  b(0, 0) = b(1, 1) = 1.0;
  b(2, 2) = b(3, 3) = -1.0;
  return b;
}

Mat4 dirac_alpha(int k) {
  if (k < 0 || k > 2) throw std::out_of_range("dirac_alpha: k must be 0, 1 or 2");
  std::array<Complex, 4> s;  // sigma^k row-major 2x2
  switch (k) {
    case 0: s = {0.0, 1.0, 1.0, 0.0}; break;
    case 1: s = {0.0, -kI, kI, 0.0}; break;
    default: s = {1.0, 0.0, 0.0, -1.0}; break;
  }
  Mat4 a;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      a(r, c + 2) = s[2 * r + c];
      a(r + 2, c) = s[2 * r + c];
    }
  return a;
}

double lambda0(const Vec3& xi) {
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + 1.0);
}

Mat4 dirac_symbol(const Vec3& xi) {
  Mat4 d = dirac_beta();
  for (int k = 0; k < 3; ++k) d = d + dirac_alpha(k) * Complex(xi[k]);
  return d;
}

Spinor apply_alpha_dot(const Vec3& a, const Spinor& v) {
  Spinor r;
  sigma_dot(a, v[2], v[3], r[0], r[1]);
  sigma_dot(a, v[0], v[1], r[2], r[3]);
  return r;
}

Spinor apply_dirac_symbol(const Vec3& xi, const Spinor& v) {
  Spinor r = apply_alpha_dot(xi, v);
  r[0] += v[0];
  r[1] += v[1];
  r[2] -= v[2];
  r[3] -= v[3];
  return r;
}

Mat4 free_projector(const Vec3& xi, Sign sign) {
  const double s = (sign == Sign::plus ? 0.5 : -0.5) / lambda0(xi);
  return Mat4::identity() * 0.5 + dirac_symbol(xi) * s;
}

Spinor apply_free_projector(const Vec3& xi, Sign sign, const Spinor& v) {
  const double s = (sign == Sign::plus ? 0.5 : -0.5) / lambda0(xi);
  const Spinor d = apply_dirac_symbol(xi, v);
  Spinor r;
  for (int c = 0; c < 4; ++c) r[c] = 0.5 * v[c] + s * d[c];
  return r;
}

Mat4 step1_propagator(const Vec3& xi, double dt, double epsilon, double delta) {
  const double scale = epsilon * delta;
  const Vec3 sxi{scale * xi[0], scale * xi[1], scale * xi[2]};
  const double lam = lambda0(sxi);
  // cos(-i lambda dt) with lambda purely imaginary reduces to the real angle theta.
  const double theta = dt * lam / (epsilon * delta * delta);
  const Complex s = -kI * (std::sin(theta) / lam);
  return Mat4::identity() * std::cos(theta) + dirac_symbol(sxi) * s;
}

DiracSymbolTables::DiracSymbolTables(const WavenumberLadder& ladder, double dt, double epsilon,
                                     double delta)
    : ladder_(&ladder), dt_(dt), scale_(epsilon * delta) {
  if (!(epsilon > 0.0 && delta > 0.0)) {
    throw std::invalid_argument("DiracSymbolTables: epsilon and delta must be positive");
  }
  const std::size_t n = ladder.size();
  lambda_.resize(n);
  cos_.resize(n);
  sin_over_lambda_.resize(n);
  const double rate = 1.0 / (epsilon * delta * delta);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double lam = std::sqrt(scale_ * scale_ * ladder.norm2(static_cast<std::size_t>(i)) + 1.0);
    const double theta = dt * lam * rate;
    lambda_[i] = lam;
    cos_[i] = std::cos(theta);
    sin_over_lambda_[i] = std::sin(theta) / lam;
  }
}

Mat4 DiracSymbolTables::propagator(std::size_t idx) const {
  const Vec3 xi = ladder_->at(idx);
  const Vec3 sxi{scale_ * xi[0], scale_ * xi[1], scale_ * xi[2]};
  return Mat4::identity() * cos_[idx] + dirac_symbol(sxi) * (-kI * sin_over_lambda_[idx]);
}

void DiracSymbolTables::apply(std::size_t idx, Spinor& v) const {
  const Vec3 xi = ladder_->at(idx);
  const Vec3 sxi{scale_ * xi[0], scale_ * xi[1], scale_ * xi[2]};
  const Spinor d = apply_dirac_symbol(sxi, v);
  const Complex s = -kI * sin_over_lambda_[idx];
  for (int c = 0; c < 4; ++c) v[c] = cos_[idx] * v[c] + s * d[c];
}

void DiracSymbolTables::apply_all(std::span<Complex> spinor_modes) const {
  const auto n = static_cast<std::ptrdiff_t>(ladder_->size());
  if (spinor_modes.size() != 4 * ladder_->size()) {
    throw std::invalid_argument("DiracSymbolTables::apply_all: size mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Complex* p = spinor_modes.data() + 4 * i;
    Spinor v{p[0], p[1], p[2], p[3]};
    apply(static_cast<std::size_t>(i), v);
    for (int c = 0; c < 4; ++c) p[c] = v[c];
  }
}

SpinorField apply_projector(const Fft& fft, const SpinorField& psi, Sign sign,
                            const ProjectorMode& mode) {
  if (!(psi.grid == fft.grid())) throw std::invalid_argument("apply_projector: grid mismatch");
  SpinorField out(psi.grid, psi.time);
  const auto n = static_cast<std::ptrdiff_t>(psi.points());
  if (const auto* spec = std::get_if<SpectralProjection>(&mode)) {
    out.data = psi.data;
    fft.forward(out.data, 4);
    const auto& ladder = fft.ladder();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Vec3 xi = ladder.at(static_cast<std::size_t>(i));
      const Vec3 sxi{spec->scale * xi[0], spec->scale * xi[1], spec->scale * xi[2]};
      out.set(static_cast<std::size_t>(i),
              apply_free_projector(sxi, sign, out.spinor(static_cast<std::size_t>(i))));
    }
    fft.inverse(out.data, 4);
  } else {
    const auto& phase = std::get<PhaseGradientProjection>(mode);
    const auto grad = spectral_gradient(fft, std::span<const double>(phase.phi));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const Vec3 xi{grad[0][i], grad[1][i], grad[2][i]};
      out.set(static_cast<std::size_t>(i),
              apply_free_projector(xi, sign, psi.spinor(static_cast<std::size_t>(i))));
    }
  }
  return out;
}

NrSplit nr_projector_split(const Fft& fft, const SpinorField& psi, double delta, double t) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("nr_projector_split: delta must be positive (use nr_projector_limit)");
  }
  SpinorField e = apply_projector(fft, psi, Sign::plus, SpectralProjection{delta});
  SpinorField p(psi.grid, psi.time);
  for (std::size_t i = 0; i < psi.data.size(); ++i) p.data[i] = psi.data[i] - e.data[i];
  const Complex phase_e = std::polar(1.0, t / (delta * delta));
  const Complex phase_p = std::conj(phase_e);
  for (auto& z : e.data) z *= phase_e;
  for (auto& z : p.data) z *= phase_p;
  return {std::move(e), std::move(p)};
}

NrSplit nr_projector_limit(const SpinorField& psi) {
  SpinorField e(psi.grid, psi.time);
  SpinorField p(psi.grid, psi.time);
  for (std::size_t i = 0; i < psi.points(); ++i) {
    e.at(i, 0) = psi.at(i, 0);
    e.at(i, 1) = psi.at(i, 1);
    p.at(i, 2) = psi.at(i, 2);
    p.at(i, 3) = psi.at(i, 3);
  }
  return {std::move(e), std::move(p)};
}

}  // namespace mdkit
