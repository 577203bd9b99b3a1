#include "mdkit/fft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <mutex>
#include <stdexcept>
#include <string>

#include "mdkit/parallel.hpp"

namespace mdkit {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& configured_threads() {
  static int threads = 0;
  return threads;
}

void ensure_fftw_threads() {
#ifdef MDKIT_HAVE_FFTW_OMP
  static const bool initialized = [] { return fftw_init_threads() != 0; }();
  if (initialized) fftw_plan_with_nthreads(thread_count());
#endif
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": field length " + std::to_string(got) +
                                " does not match grid size " + std::to_string(want));
  }
}

}  // namespace

int thread_count() {
  const int t = configured_threads();
  return t > 0 ? t : omp_get_num_procs();
}

void set_thread_count(int threads) {
  configured_threads() = threads > 0 ? threads : 0;
  omp_set_num_threads(thread_count());
}

struct Fft::Plans {
  // index 0: one component, 1: three, 2: four
  fftw_plan fwd[3] = {nullptr, nullptr, nullptr};
  fftw_plan bwd[3] = {nullptr, nullptr, nullptr};

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (int i = 0; i < 3; ++i) {
      if (fwd[i]) fftw_destroy_plan(fwd[i]);
      if (bwd[i]) fftw_destroy_plan(bwd[i]);
    }
  }
};

namespace {
int plan_slot(int components) {
  switch (components) {
    case 1: return 0;
    case 3: return 1;
    case 4: return 2;
    default:
      throw std::invalid_argument("Fft: unsupported component count " +
                                  std::to_string(components));
  }
}
}  // namespace

Fft::Fft(const GridSpec& grid) : grid_(grid), ladder_(grid), plans_(std::make_unique<Plans>()) {
  std::lock_guard lock(planner_mutex());
  ensure_fftw_threads();
  const int n[3] = {grid.n()[0], grid.n()[1], grid.n()[2]};
  const std::size_t points = grid.size();
  const int counts[3] = {1, 3, 4};
  for (int s = 0; s < 3; ++s) {
    const int c = counts[s];
    auto* scratch = fftw_alloc_complex(points * c);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans_->fwd[s] = fftw_plan_many_dft(3, n, c, scratch, nullptr, c, 1, scratch, nullptr, c, 1,
                                        FFTW_FORWARD, flags);
    plans_->bwd[s] = fftw_plan_many_dft(3, n, c, scratch, nullptr, c, 1, scratch, nullptr, c, 1,
                                        FFTW_BACKWARD, flags);
    fftw_free(scratch);
    if (!plans_->fwd[s] || !plans_->bwd[s]) throw std::runtime_error("Fft: FFTW planning failed");
  }
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::execute(std::span<Complex> data, int components, bool forward) const {
  const int slot = plan_slot(components);
  check_size(data.size(), grid_.size() * components, forward ? "dft" : "idft");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(forward ? plans_->fwd[slot] : plans_->bwd[slot], ptr, ptr);
}

void Fft::forward(std::span<Complex> data, int components) const {
  execute(data, components, true);
}

void Fft::inverse(std::span<Complex> data, int components) const {
  execute(data, components, false);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= scale;
}

ComplexField dft(const Fft& fft, std::span<const Complex> field) {
  check_size(field.size(), fft.grid().size(), "dft");
  ComplexField out(field.begin(), field.end());
  fft.forward(out);
  return out;
}

ComplexField dft(const Fft& fft, std::span<const double> field) {
  check_size(field.size(), fft.grid().size(), "dft");
  ComplexField out(field.begin(), field.end());
  fft.forward(out);
  return out;
}

ComplexField idft(const Fft& fft, std::span<const Complex> modes) {
  check_size(modes.size(), fft.grid().size(), "idft");
  ComplexField out(modes.begin(), modes.end());
  fft.inverse(out);
  return out;
}

std::array<ComplexField, 3> spectral_gradient(const Fft& fft, std::span<const Complex> field) {
  const ComplexField modes = dft(fft, field);
  const auto& ladder = fft.ladder();
  const std::size_t n = modes.size();
  // Three interleaved components so one batched inverse covers the gradient.
  ComplexField packed(3 * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const Vec3 k = ladder.derivative_at(static_cast<std::size_t>(i));
    const Complex ik = Complex(0.0, 1.0) * modes[i];
    for (int j = 0; j < 3; ++j) packed[3 * i + j] = k[j] * ik;
  }
  fft.inverse(packed, 3);
  std::array<ComplexField, 3> out;
  for (int j = 0; j < 3; ++j) {
    out[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) out[j][i] = packed[3 * i + j];
  }
  return out;
}

std::array<RealField, 3> spectral_gradient(const Fft& fft, std::span<const double> field) {
  check_size(field.size(), fft.grid().size(), "spectral_gradient");
  const ComplexField z(field.begin(), field.end());
  const auto g = spectral_gradient(fft, std::span<const Complex>(z));
  std::array<RealField, 3> out;
  for (int j = 0; j < 3; ++j) {
    out[j].resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[j][i] = g[j][i].real();
  }
  return out;
}

RealField spectral_divergence(const Fft& fft, const std::array<RealField, 3>& field) {
  const std::size_t n = fft.grid().size();
  for (const auto& c : field) check_size(c.size(), n, "spectral_divergence");
  ComplexField packed(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) packed[3 * i + j] = field[j][i];
  }
  fft.forward(packed, 3);
  const auto& ladder = fft.ladder();
  ComplexField div(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const Vec3 k = ladder.derivative_at(static_cast<std::size_t>(i));
    Complex s = 0.0;
    for (int j = 0; j < 3; ++j) s += k[j] * packed[3 * i + j];
    div[i] = Complex(0.0, 1.0) * s;
  }
  fft.inverse(div);
  RealField out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = div[i].real();
  return out;
}

RealField solve_poisson(const Fft& fft, std::span<const double> source, double scale) {
  ComplexField modes = dft(fft, source);
  const auto& ladder = fft.ladder();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(modes.size()); ++i) {
    const double k2 = ladder.norm2(static_cast<std::size_t>(i));
    modes[i] = k2 > 0.0 ? scale * modes[i] / k2 : Complex(0.0);
  }
  fft.inverse(modes);
  RealField out(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) out[i] = modes[i].real();
  return out;
}

}  // namespace mdkit
