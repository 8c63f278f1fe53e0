#include "patchlab/timestep.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "patchlab/contour.hpp"
#include "patchlab/dispersion.hpp"
#include "patchlab/fourier.hpp"

namespace patchlab {
namespace {

Spectrum cosine_state(const ContourOps& ops, double eps, long j) {
  std::vector<double> x = grid_points(ops.grid_n());
  std::vector<double> h(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) h[i] = eps * std::cos(j * x[i]);
  return ops.fft_n().analyze(h_to_f_grid(h));
}

double state_distance(const Spectrum& a, const Spectrum& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.c.size(); ++i) acc = std::max(acc, std::abs(a.c[i] - b.c[i]));
  return acc;
}

TEST(Timestep, Rk4HitsFourthOrderOnRotatingMode) {
  // u_t = -i lambda u, exact phase known
  double lam = 2.3;
  auto rhs = [lam](const Spectrum& u) {
    Spectrum r = u;
    for (auto& v : r.c) v *= cplx(0.0, -lam);
    return r;
  };
  auto run = [&](double dt) {
    Spectrum u(8);
    u.c[1] = cplx(1.0, 0.0);
    double t = 0.0;
    while (t < 4.0 - 1e-12) {
      u = rk4_step(rhs, u, dt);
      t += dt;
    }
    return std::abs(u.c[1] - std::exp(cplx(0.0, -lam * 4.0)));
  };
  double e1 = run(0.04), e2 = run(0.02), e3 = run(0.01);
  EXPECT_GT(e1, 0.0);
  double p12 = std::log2(e1 / e2), p23 = std::log2(e2 / e3);
  EXPECT_NEAR(p12, 4.0, 0.3);
  EXPECT_NEAR(p23, 4.0, 0.3);
}

TEST(Timestep, IfrkHitsFourthOrderOnFullDynamics) {
  ContourOps ops(AlphaParam(0.5), 64, 256);
  Ifrk4 stepper(ops);
  Spectrum f0 = cosine_state(ops, 0.05, 1);
  auto run = [&](double dt) {
    Spectrum u = f0;
    std::size_t n = static_cast<std::size_t>(std::llround(1.0 / dt));
    for (std::size_t i = 0; i < n; ++i) u = stepper.step(u, dt);
    return u;
  };
  Spectrum ref = run(1.0 / 256.0);
  double e1 = state_distance(run(0.1), ref);
  double e2 = state_distance(run(0.05), ref);
  double e3 = state_distance(run(0.025), ref);
  double p12 = std::log2(e1 / e2), p23 = std::log2(e2 / e3);
  EXPECT_NEAR(p12, 4.0, 0.4);
  EXPECT_NEAR(p23, 4.0, 0.4);
}

TEST(Timestep, IfrkAgreesWithPlainRk4) {
  // same one-step order, same equation: difference is O(dt^5)
  ContourOps ops(AlphaParam(0.5), 64, 256);
  Ifrk4 stepper(ops);
  auto rhs = [&](const Spectrum& u) { return ops.rhs_f(u); };
  Spectrum f = cosine_state(ops, 0.05, 1);
  Spectrum a = f, b = f;
  for (int i = 0; i < 50; ++i) {
    a = stepper.step(a, 0.01);
    b = rk4_step(rhs, b, 0.01);
  }
  EXPECT_LE(state_distance(a, b), 1e-10);
}

TEST(Timestep, ConservedQuantitiesDriftWithinBudget) {
  ContourOps ops(AlphaParam(0.5), 128, 512);
  Spectrum f0 = cosine_state(ops, 0.05, 1);
  EvolveOptions opt;
  opt.dt = 0.02;
  opt.t_final = 10.0;
  opt.record_every = 50;
  EvolveResult r = evolve(ops, f0, opt);
  ASSERT_TRUE(r.completed) << r.failure;
  EXPECT_EQ(r.steps, 500u);
  ASSERT_GE(r.history.size(), 2u);
  EXPECT_EQ(r.history.front().t, 0.0);
  EXPECT_NEAR(r.history.back().t, 10.0, 1e-12);

  const EvolveSample& s0 = r.history.front();
  double disc_energy = ops.energy(Spectrum(ops.grid_n()));
  double e_scale = std::abs(s0.energy - disc_energy);
  for (const EvolveSample& s : r.history) {
    EXPECT_LE(std::abs(s.momentum - s0.momentum) / s0.momentum, 1e-6);
    EXPECT_LE(std::abs(s.area - s0.area), 1e-12);
    EXPECT_LE(std::abs(s.energy - s0.energy) / e_scale, 1e-5);
  }
}

TEST(Timestep, ModalFrequencyMatchesDispersion) {
  ContourOps ops(AlphaParam(0.5), 128, 512);
  ModalFrequency mf = modal_frequency(ops, 3, 1e-5, 0.02, 5.0);
  EXPECT_EQ(mf.expected, -omega(ops.ap, 3.0));
  EXPECT_LE(mf.rel_err, 1e-3);
}

TEST(Timestep, LifespanShortRunStaysWithinDouble) {
  ContourOps ops(AlphaParam(0.5), 64, 256);
  LifespanRow row = lifespan_run(ops, 0.1, 0.05, 3.0, 0.05);
  EXPECT_TRUE(row.completed);
  EXPECT_NEAR(row.t_target, 5.0, 1e-12);
  EXPECT_EQ(row.steps, 100u);
  EXPECT_GE(row.sup_ratio, 0.999);  // the initial norm is eps by construction
  EXPECT_LE(row.sup_ratio, 2.0);
  EXPECT_TRUE(row.within_double);
}

TEST(Timestep, EvolveRejectsBadOptions) {
  ContourOps ops(AlphaParam(0.5), 64, 256);
  EvolveOptions opt;
  opt.dt = 0.0;
  EXPECT_THROW(evolve(ops, Spectrum(64), opt), std::invalid_argument);
}

TEST(Timestep, EvolveReportsGeometryBreakdown) {
  ContourOps ops(AlphaParam(0.5), 64, 256);
  Spectrum f0(64);
  f0.c[0] = cplx(-0.6, 0.0);  // radius already lost before the first step
  EvolveOptions opt;
  opt.dt = 0.02;
  opt.t_final = 1.0;
  EvolveResult r = evolve(ops, f0, opt);
  EXPECT_FALSE(r.completed);
  EXPECT_NE(r.failure.find("positivity"), std::string::npos);
}

}  // namespace
}  // namespace patchlab
