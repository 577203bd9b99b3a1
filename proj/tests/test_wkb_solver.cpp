#include <gtest/gtest.h>

#include <cmath>

#include "mdkit/diagnostics.hpp"
#include "mdkit/wkb_solver.hpp"
#include "test_support.hpp"

using namespace mdkit;

namespace {

double norm2(const SpinorField& u) {
  double s = 0.0;
  for (const auto& z : u.data) s += std::norm(z);
  return s;
}

RealField cosine_phase(const GridSpec& g, double amp) {
  RealField phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) phi[i] = amp * std::cos(2 * M_PI * g.point(i)[0]);
  return phi;
}

// phi(t, x) for phi0 = amp cos(2 pi x1) and h = sqrt(1 + p^2), traced back
// along the characteristic x = x0 + t p0 / lambda(p0) by Newton's method.
double characteristic_phase(double x, double t, double amp) {
  auto p0 = [&](double y) { return -2 * M_PI * amp * std::sin(2 * M_PI * y); };
  auto dp0 = [&](double y) { return -4 * M_PI * M_PI * amp * std::cos(2 * M_PI * y); };
  double y = x;
  for (int it = 0; it < 60; ++it) {
    const double p = p0(y), lam = std::sqrt(1 + p * p);
    const double f = y + t * p / lam - x;
    const double df = 1 + t * dp0(y) / (lam * lam * lam);
    y -= f / df;
  }
  const double p = p0(y);
  return amp * std::cos(2 * M_PI * y) - t / std::sqrt(1 + p * p);
}

double phase_error(int n, double amp, double T) {
  const GridSpec g = make_cube(-0.5, 0.5, n);
  const HamiltonianSpec h{Sign::plus, {}};
  RealField phi = cosine_phase(g, amp);
  const double limit = eiconal_max_dt(g, phi, h);
  const long steps = static_cast<long>(std::ceil(T / (0.5 * limit)));
  for (long s = 0; s < steps; ++s) phi = eiconal_step(g, phi, T / steps, h);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(phi[i] - characteristic_phase(g.point(i)[0], T, amp)));
  }
  return err;
}

}  // namespace

TEST(Hamiltonian, EvaluatesBothBranches) {
  const HamiltonianSpec plus{Sign::plus, [](const Vec3& x) { return x[0]; }};
  const HamiltonianSpec minus{Sign::minus, {}};
  EXPECT_DOUBLE_EQ(plus({2.0, 0, 0}, {0, 3.0, 4.0}), std::sqrt(26.0) + 2.0);
  EXPECT_DOUBLE_EQ(minus({2.0, 0, 0}, {0, 3.0, 4.0}), -std::sqrt(26.0));
}

TEST(Eiconal, FlatPhaseDriftsAtRestEnergy) {
  const GridSpec g = make_cube(-0.5, 0.5, 8);
  RealField p(g.size(), 0.2), m(g.size(), -0.1);
  EXPECT_TRUE(std::isinf(eiconal_max_dt(g, p, {Sign::plus, {}})));
  for (int s = 0; s < 4; ++s) {
    p = eiconal_step(g, p, 0.25, {Sign::plus, {}});
    m = eiconal_step(g, m, 0.25, {Sign::minus, {}});
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(p[i], 0.2 - 1.0, 1e-14);
    EXPECT_NEAR(m[i], -0.1 + 1.0, 1e-14);
  }
}

TEST(Eiconal, AgreesWithCharacteristicsBeforeCaustic) {
  // Breaking time is 1 / (4 pi^2 amp) ~ 0.51; stop well before it.
  const double amp = 0.05, T = 0.2;
  const double e1 = phase_error(32, amp, T);
  const double e2 = phase_error(64, amp, T);
  const double e3 = phase_error(128, amp, T);
  EXPECT_LT(e2, 2e-4);
  EXPECT_GT(std::log2(e1 / e2), 1.5);
  EXPECT_GT(std::log2(e2 / e3), 1.5);
}

TEST(Eiconal, CflViolationThrows) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  const RealField phi = cosine_phase(g, 0.5);
  const HamiltonianSpec h{Sign::plus, {}};
  const double limit = eiconal_max_dt(g, phi, h);
  Vec3 speeds{};
  eiconal_rhs(g, phi, h, &speeds);
  EXPECT_NEAR(limit, g.spacing()[0] / (2.0 * speeds[0]), 1e-15);
  EXPECT_NO_THROW(eiconal_step(g, phi, 0.9 * limit, h));
  EXPECT_THROW(eiconal_step(g, phi, 1.5 * limit, h), CflError);
}

TEST(Eiconal, BranchesStayAntisymmetric) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  RealField phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    phi[i] = 0.05 * std::cos(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[1]) + 0.02 * std::cos(2 * M_PI * x[2]);
  }
  WkbSolver solver(g, {});
  RealField minus(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) minus[i] = -phi[i];
  WkbState s = solver.initial_state(phi, minus, SpinorField(g), SpinorField(g));
  for (int k = 0; k < 5; ++k) solver.advance_phases(s, 0.02);
  for (std::size_t i = 0; i < phi.size(); ++i) ASSERT_NEAR(s.phi_plus[i], -s.phi_minus[i], 1e-14);
}

TEST(GroupVelocity, MatchesAnalyticGradient) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  const Fft fft(g);
  const RealField phi = cosine_phase(g, 0.3);
  const auto w = group_velocity(fft, phi, Sign::minus);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = -0.6 * M_PI * std::sin(2 * M_PI * g.point(i)[0]);
    ASSERT_NEAR(w[0][i], -p / std::sqrt(1 + p * p), 1e-12);
    ASSERT_NEAR(w[1][i], 0.0, 1e-14);
  }
}

TEST(PolarizedChi, IsPositiveEigenvector) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const Vec3 xi = t < 50 ? Vec3{u(rng), u(rng), u(rng)} : Vec3{1e-6 * u(rng), 1e-6 * u(rng), 1e-6 * u(rng)};
    const Spinor chi = polarized_chi(xi);
    const Spinor pc = apply_free_projector(xi, Sign::plus, chi);
    double scale = 0.0;
    for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(chi[c]));
    EXPECT_GT(scale, 0.0);
    for (int c = 0; c < 4; ++c) EXPECT_LT(std::abs(pc[c] - chi[c]), 1e-12 * scale);
  }
  const Spinor zero = polarized_chi({0, 0, 0});
  EXPECT_EQ(zero[0], Complex(1.0));
  EXPECT_EQ(zero[1], Complex(0.0));
  EXPECT_EQ(zero[2], Complex(0.0));
  EXPECT_EQ(zero[3], Complex(0.0));
}

TEST(PolarizedAmplitude, CustomBaseIsProjectedPointwise) {
  const GridSpec g = make_cube(-0.5, 0.5, 8);
  const Fft fft(g);
  const RealField phi = cosine_phase(g, 0.2);
  const SpinorField base = testutil::random_spinor_field(g, 4);
  const SpinorField up = polarized_amplitude(fft, phi, PolarizedCustom{base, Sign::plus});
  const SpinorField um = polarized_amplitude(fft, phi, PolarizedCustom{base, Sign::minus});
  for (std::size_t i = 0; i < base.data.size(); ++i) {
    ASSERT_LT(std::abs(up.data[i] + um.data[i] - base.data[i]), 1e-13);
  }
  const SpinorField flat = polarized_amplitude(fft, RealField(g.size(), 0.0), PolarizedExample{});
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(flat.at(i, 0), Complex(1.0));
}

TEST(Reconstruct, CombinesBranchesWithPhases) {
  const GridSpec g = make_cube(-0.5, 0.5, 4);
  WkbState s(g);
  s.u_plus = testutil::random_spinor_field(g, 1);
  s.u_minus = testutil::random_spinor_field(g, 2);
  s.phi_plus = testutil::random_real_field(g, 3);
  s.phi_minus = testutil::random_real_field(g, 4);
  const double eps = 0.1;
  const SpinorField psi = wkb_reconstruct(s, eps);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int c = 0; c < 4; ++c) {
      const Complex want = s.u_plus.at(i, c) * std::polar(1.0, s.phi_plus[i] / eps) +
                           s.u_minus.at(i, c) * std::polar(1.0, s.phi_minus[i] / eps);
      ASSERT_LT(std::abs(psi.at(i, c) - want), 1e-14);
    }
  }
}

TEST(WkbSolver, RejectsExternalVectorPotentialAndGridMismatch) {
  const GridSpec g = make_cube(-0.5, 0.5, 4);
  ExternalFields ext;
  ext.a_ex = [](double, const Vec3&) { return Vec3{1, 0, 0}; };
  EXPECT_THROW(WkbSolver(g, ext), std::invalid_argument);
  WkbSolver ok(g, {});
  const GridSpec other = make_cube(-0.5, 0.5, 8);
  EXPECT_THROW(ok.initial_state(RealField(g.size()), RealField(g.size()), SpinorField(other), SpinorField(g)),
               std::invalid_argument);
}

TEST(WkbSolver, FlatPhaseKeepsDensityAndEmptyBranch) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  WkbSolver solver(g, {});
  const SpinorField u0 = gaussian_spinor(g, {0, 0, 0}, 1.0 / 16.0, Spinor{1.0, 0.0, 0.0, 0.0},
                                         [](const Vec3&) { return 0.0; }, 1.0);
  const RealField zero(g.size(), 0.0);
  WkbState s = solver.initial_state(zero, zero, u0, SpinorField(g));
  for (int k = 0; k < 16; ++k) ASSERT_TRUE(solver.advance(s, 1.0 / 64.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double a = 0.0, b = 0.0;
    for (int c = 0; c < 4; ++c) {
      a += std::norm(s.u_plus.at(i, c));
      b += std::norm(u0.at(i, c));
      ASSERT_EQ(s.u_minus.at(i, c), Complex(0.0));
    }
    worst = std::max(worst, std::abs(a - b));
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_NEAR(s.time, 0.25, 1e-15);
  double vmax = 0.0;
  for (double v : s.fields.v) vmax = std::max(vmax, std::abs(v));
  EXPECT_GT(vmax, 0.0);
}

TEST(WkbSolver, TransportConservesCharge) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  WkbSolver solver(g, {});
  const Fft& fft = solver.fft();
  RealField phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    phi[i] = 0.03 * std::cos(2 * M_PI * x[0]) * std::cos(2 * M_PI * x[1]);
  }
  const SpinorField base = testutil::smooth_spinor(g, 0.12);
  WkbState s = solver.initial_state(phi, phi, polarized_amplitude(fft, phi, PolarizedCustom{base, Sign::plus}),
                                    polarized_amplitude(fft, phi, PolarizedCustom{base, Sign::minus}));
  const double q0 = norm2(s.u_plus) + norm2(s.u_minus);
  for (int k = 0; k < 8; ++k) {
    ASSERT_TRUE(solver.advance(s, 1.0 / 32.0));
    const double q = norm2(s.u_plus) + norm2(s.u_minus);
    ASSERT_LT(std::abs(q - q0) / q0, 1e-8);
  }
  EXPECT_GT(s.max_div_omega, 0.0);
}

TEST(WkbSolver, FlagsCausticAndRestoresPhases) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  WkbOptions opt;
  opt.caustic_threshold = 6.0;
  WkbSolver solver(g, {}, opt);
  const RealField phi = cosine_phase(g, 0.1);
  const SpinorField u = gaussian_spinor(g, {0, 0, 0}, 0.1, Spinor{1.0, 0.0, 0.0, 0.0},
                                        [](const Vec3&) { return 0.0; }, 1.0);
  WkbState s = solver.initial_state(phi, phi, u, SpinorField(g));
  const double dt = 1.0 / 64.0;
  bool flagged = false;
  for (int k = 0; k < 64 && !flagged; ++k) {
    const RealField before = s.phi_plus;
    const double t = s.time;
    if (!solver.advance(s, dt)) {
      flagged = true;
      EXPECT_EQ(s.phi_plus, before);
      EXPECT_TRUE(s.caustic);
      EXPECT_DOUBLE_EQ(s.caustic_time, t + dt);
      EXPECT_DOUBLE_EQ(s.time, t);
      EXPECT_GT(s.max_div_omega, 6.0);
      EXPECT_GT(t, 0.0);
    }
  }
  ASSERT_TRUE(flagged);
  EXPECT_FALSE(solver.advance(s, dt));
}
