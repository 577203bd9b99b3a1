#include <gtest/gtest.h>

#include <cmath>

#include "mdkit/diagnostics.hpp"
#include "mdkit/sp_solver.hpp"
#include "test_support.hpp"

using namespace mdkit;

namespace {

// Free Schroedinger Gaussian i u_t = -s Delta/2 u (s = +1 electron, -1
// positron) from exp(-|x|^2 / (4 w^2)), summed over periodic images.
Complex free_gaussian(const Vec3& x, double t, double w, double s) {
  const Complex z = 1.0 + Complex(0.0, s * t / (2.0 * w * w));
  Complex sum = 0.0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c) {
        const double r2 = std::pow(x[0] + a, 2) + std::pow(x[1] + b, 2) + std::pow(x[2] + c, 2);
        sum += std::pow(z, -1.5) * std::exp(-r2 / (4.0 * w * w * z));
      }
  return sum;
}

SpState gaussian_pair(const GridSpec& g, double w) {
  SpState s(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    s.phi_e.at(i, 0) = std::exp(-r2 / (4 * w * w));
    s.phi_p.at(i, 2) = std::exp(-r2 / (4 * w * w));
  }
  return s;
}

double density_sum(const SpState& s) {
  double q = 0.0;
  for (std::size_t k = 0; k < s.phi_e.data.size(); ++k) q += std::norm(s.phi_e.data[k]) + std::norm(s.phi_p.data[k]);
  return q;
}

}  // namespace

TEST(SpSolver, FreeGaussiansMatchAnalyticSolution) {
  const GridSpec g = make_cube(-0.5, 0.5, 32);
  SpSolver solver(g, {}, SpOptions{false, Splitting::strang});
  const double w = 0.05, dt = 0.001;
  SpState s = gaussian_pair(g, w);
  for (int k = 0; k < 5; ++k) solver.advance(s, dt);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    err = std::max(err, std::abs(s.phi_e.at(i, 0) - free_gaussian(x, 0.005, w, 1.0)));
    err = std::max(err, std::abs(s.phi_p.at(i, 2) - free_gaussian(x, 0.005, w, -1.0)));
    for (double v : {s.v[i]}) ASSERT_EQ(v, 0.0);
  }
  EXPECT_LT(err, 1e-10);
}

TEST(SpSolver, PotentialSolvesPoissonWithNeutralizingBackground) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  SpSolver solver(g, {});
  SpState s(g);
  s.phi_e = testutil::smooth_spinor(g, 0.1);
  s.phi_p = testutil::random_spinor_field(g, 2, 0.1);
  solver.update_potential(s);
  RealField rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int c = 0; c < 4; ++c) rho[i] += std::norm(s.phi_e.at(i, c)) + std::norm(s.phi_p.at(i, c));
  }
  EXPECT_LT(testutil::max_abs_diff(s.v, solve_poisson(solver.fft(), rho)), 1e-14);
  double mean = 0.0;
  for (double v : s.v) mean += v;
  EXPECT_LT(std::abs(mean) / g.size(), 1e-16);
}

TEST(SpSolver, InitialStateSplitsField) {
  const GridSpec g = make_cube(-0.5, 0.5, 8);
  SpSolver solver(g, {});
  const SpinorField psi = testutil::smooth_spinor(g);
  const SpState s = solver.initial_state(psi, 0.1);
  for (std::size_t k = 0; k < psi.data.size(); ++k) {
    ASSERT_LT(std::abs(s.phi_e.data[k] + s.phi_p.data[k] - psi.data[k]), 1e-13);
  }
  EXPECT_NEAR(total_charge(s), total_charge(psi), 1e-13);
}

TEST(SpSolver, SubstepsAreIsometries) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  ExternalFields ext;
  ext.v_ex = [](double t, const Vec3& x) { return (1.0 + t) * (x[0] * x[0] + x[1] * x[1]); };
  SpSolver solver(g, ext);
  SpState s = solver.initial_state(testutil::smooth_spinor(g, 0.08), 0.5);
  double q = density_sum(s);
  for (int k = 0; k < 200; ++k) {
    solver.step1(s, 0.01);
    const double q1 = density_sum(s);
    ASSERT_LT(std::abs(q1 - q) / q, 1e-13);
    solver.step2(s, 0.01, 0.01 * k);
    const double q2 = density_sum(s);
    ASSERT_LT(std::abs(q2 - q1) / q1, 1e-13);
    q = q2;
  }
}

TEST(SpSolver, Step2IsPotentialPhase) {
  const GridSpec g = make_cube(-0.5, 0.5, 4);
  ExternalFields ext;
  ext.v_ex = [](double t, const Vec3& x) { return t + x[0]; };
  SpSolver solver(g, ext, SpOptions{false, Splitting::strang});
  SpState s(g);
  s.phi_e = testutil::random_spinor_field(g, 5);
  s.phi_p = testutil::random_spinor_field(g, 6);
  const SpState before = s;
  solver.step2(s, 0.2, 0.3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex f = std::polar(1.0, -(0.3 + g.point(i)[0]) * 0.2);
    for (int c = 0; c < 4; ++c) {
      ASSERT_LT(std::abs(s.phi_e.at(i, c) - f * before.phi_e.at(i, c)), 1e-15);
      ASSERT_LT(std::abs(s.phi_p.at(i, c) - f * before.phi_p.at(i, c)), 1e-15);
    }
  }
}

TEST(SpSolver, StrangIsSecondOrderWithSelfPotential) {
  const GridSpec g = make_cube(-0.5, 0.5, 16);
  SpSolver solver(g, {});
  SpinorField psi = testutil::smooth_spinor(g, 0.1);
  for (auto& z : psi.data) z *= 20.0;  // strong enough for V to matter
  const SpState s0 = solver.initial_state(psi, 0.5);
  auto run = [&](int steps) {
    SpState s = s0;
    for (int k = 0; k < steps; ++k) solver.advance(s, 0.1 / steps);
    return s;
  };
  const SpState ref = run(2048);
  std::vector<double> errs;
  for (int steps : {16, 32, 64}) {
    const SpState s = run(steps);
    errs.push_back(error_norms(s.phi_e, ref.phi_e).l2_rel);
  }
  for (double o : convergence_orders(errs)) EXPECT_NEAR(o, 2.0, 0.3);
}
