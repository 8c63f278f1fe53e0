#pragma once

// Integrating-factor RK4 in mode space: the linear phase e^{-i omega(j) t}
// is applied exactly, the quadrature nonlinearity goes through classic RK4.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "patchlab/contour.hpp"
#include "patchlab/dispersion.hpp"
#include "patchlab/fourier.hpp"

namespace patchlab {

// generic RK4 step for tests and small mode models
template <class Rhs>
Spectrum rk4_step(const Rhs& rhs, const Spectrum& u, double dt) {
  auto axpy = [](const Spectrum& a, double c, const Spectrum& b) {
    Spectrum r = a;
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] += c * b.c[i];
    return r;
  };
  Spectrum k1 = rhs(u);
  Spectrum k2 = rhs(axpy(u, dt / 2.0, k1));
  Spectrum k3 = rhs(axpy(u, dt / 2.0, k2));
  Spectrum k4 = rhs(axpy(u, dt, k3));
  Spectrum out = u;
  for (std::size_t i = 0; i < out.c.size(); ++i)
    out.c[i] += dt / 6.0 * (k1.c[i] + 2.0 * k2.c[i] + 2.0 * k3.c[i] + k4.c[i]);
  return out;
}

class Ifrk4 {
 public:
  explicit Ifrk4(const ContourOps& ops) : ops_(ops) {
    std::size_t half = ops.grid_n() / 2;
    om_.resize(half + 1);
    for (std::size_t j = 0; j <= half; ++j) om_[j] = omega(ops.ap, static_cast<double>(j));
  }

  // nonlinear remainder: rhs_f(u) + i omega(D) u
  Spectrum nonlinear(const Spectrum& u) const {
    Spectrum r = ops_.rhs_f(u);
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] += cplx(0.0, om_[j]) * u.c[j];
    return r;
  }

  Spectrum step(const Spectrum& u, double dt) const {
    std::size_t nc = u.c.size();
    std::vector<cplx> e1(nc), e2(nc);
    for (std::size_t j = 0; j < nc; ++j) {
      e1[j] = std::exp(cplx(0.0, -om_[j] * dt / 2.0));
      e2[j] = e1[j] * e1[j];
    }
    auto mul = [&](const Spectrum& a, const std::vector<cplx>& e) {
      Spectrum r = a;
      for (std::size_t j = 0; j < nc; ++j) r.c[j] *= e[j];
      return r;
    };
    auto axpy = [](const Spectrum& a, double c, const Spectrum& b) {
      Spectrum r = a;
      for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] += c * b.c[i];
      return r;
    };
    Spectrum k1 = nonlinear(u);
    Spectrum k2 = nonlinear(mul(axpy(u, dt / 2.0, k1), e1));
    Spectrum k3 = nonlinear(axpy(mul(u, e1), dt / 2.0, k2));
    Spectrum k4 = nonlinear(axpy(mul(u, e2), dt, mul(k3, e1)));
    Spectrum out = mul(u, e2);
    for (std::size_t j = 0; j < nc; ++j)
      out.c[j] += dt / 6.0 * (e2[j] * k1.c[j] + 2.0 * e1[j] * (k2.c[j] + k3.c[j]) + k4.c[j]);
    return out;
  }

 private:
  const ContourOps& ops_;
  std::vector<double> om_;
};

struct EvolveOptions {
  double dt = 0.02;
  double t_final = 10.0;
  std::size_t record_every = 10;  // history row cadence, in steps
  double h_norm_order = 3.0;      // Sobolev order tracked for sup ||h||
};

struct EvolveSample {
  double t = 0.0;
  double momentum = 0.0, area = 0.0, energy = 0.0;
  double h_norm = 0.0;
};

struct EvolveResult {
  Spectrum state;
  std::vector<EvolveSample> history;
  double sup_h_norm = 0.0;  // sup over every step, not just recorded rows
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  bool completed = false;
  std::string failure;
};

inline double h_sobolev_norm(const ContourOps& ops, const Spectrum& f, double order) {
  std::vector<double> h = f_to_h_grid(ops.fft_n().synthesize(f));
  return hs_norm(ops.fft_n().analyze(h), order);
}

inline EvolveResult evolve(const ContourOps& ops, const Spectrum& f0, const EvolveOptions& opt) {
  if (opt.dt <= 0.0 || opt.t_final <= 0.0) throw std::invalid_argument("evolve: dt and t_final must be positive");
  Ifrk4 stepper(ops);
  EvolveResult res;
  res.state = f0;
  std::size_t nsteps = static_cast<std::size_t>(std::llround(opt.t_final / opt.dt));
  auto t0 = std::chrono::steady_clock::now();
  auto record = [&](std::size_t istep) {
    Conserved c = ops.conserved(res.state);
    EvolveSample s;
    s.t = opt.dt * static_cast<double>(istep);
    s.momentum = c.momentum;
    s.area = c.area;
    s.energy = c.energy;
    s.h_norm = h_sobolev_norm(ops, res.state, opt.h_norm_order);
    res.history.push_back(s);
  };
  try {
    record(0);
    res.sup_h_norm = res.history.front().h_norm;
    for (std::size_t i = 1; i <= nsteps; ++i) {
      res.state = stepper.step(res.state, opt.dt);
      res.sup_h_norm = std::max(res.sup_h_norm, h_sobolev_norm(ops, res.state, opt.h_norm_order));
      res.steps = i;
      if (i % opt.record_every == 0 || i == nsteps) record(i);
    }
    res.completed = true;
  } catch (const std::runtime_error& e) {
    res.failure = e.what();
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

struct ModalFrequency {
  double measured = 0.0;
  double expected = 0.0;  // -omega(j)
  double rel_err = 0.0;
};

// Fits d(arg f_j)/dt of a tiny single-mode state against -omega(j).
inline ModalFrequency modal_frequency(const ContourOps& ops, long j, double eps, double dt,
                                      double t_final) {
  std::vector<double> x = grid_points(ops.grid_n());
  std::vector<double> h(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) h[i] = eps * std::cos(j * x[i]);
  Spectrum f = ops.fft_n().analyze(h_to_f_grid(h));
  Ifrk4 stepper(ops);
  std::size_t nsteps = static_cast<std::size_t>(std::llround(t_final / dt));
  std::vector<double> ts(nsteps + 1), ph(nsteps + 1);
  double prev = std::arg(f.c[j]), unwrapped = prev;
  ts[0] = 0.0;
  ph[0] = unwrapped;
  for (std::size_t i = 1; i <= nsteps; ++i) {
    f = stepper.step(f, dt);
    double raw = std::arg(f.c[j]);
    double d = raw - prev;
    while (d > pi) d -= 2.0 * pi;
    while (d < -pi) d += 2.0 * pi;
    unwrapped += d;
    prev = raw;
    ts[i] = dt * static_cast<double>(i);
    ph[i] = unwrapped;
  }
  double tm = 0.0, pm = 0.0;
  for (std::size_t i = 0; i <= nsteps; ++i) {
    tm += ts[i];
    pm += ph[i];
  }
  tm /= static_cast<double>(nsteps + 1);
  pm /= static_cast<double>(nsteps + 1);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= nsteps; ++i) {
    num += (ts[i] - tm) * (ph[i] - pm);
    den += (ts[i] - tm) * (ts[i] - tm);
  }
  ModalFrequency out;
  out.measured = num / den;
  out.expected = -omega(ops.ap, static_cast<double>(j));
  out.rel_err = std::abs(out.measured - out.expected) / std::abs(out.expected);
  return out;
}

struct LifespanRow {
  double eps = 0.0;
  double t_target = 0.0;
  double sup_ratio = 0.0;  // sup_t ||h||_{H^s} / eps
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  bool within_double = false;  // sup ||h|| <= 2 eps up to t_target
  bool completed = false;
};

// Runs to T = c_budget / eps^2 from eps * (cos x + cos 2x) normalized in H^s.
inline LifespanRow lifespan_run(const ContourOps& ops, double eps, double c_budget, double s_order,
                                double dt) {
  std::vector<double> x = grid_points(ops.grid_n());
  std::vector<double> h0(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) h0[i] = std::cos(x[i]) + std::cos(2.0 * x[i]);
  double nrm = hs_norm(ops.fft_n().analyze(h0), s_order);
  for (auto& v : h0) v *= eps / nrm;

  EvolveOptions opt;
  opt.dt = dt;
  opt.t_final = c_budget / (eps * eps);
  opt.record_every = 1000;
  opt.h_norm_order = s_order;
  EvolveResult r = evolve(ops, ops.fft_n().analyze(h_to_f_grid(h0)), opt);

  LifespanRow row;
  row.eps = eps;
  row.t_target = opt.t_final;
  row.sup_ratio = r.sup_h_norm / eps;
  row.steps = r.steps;
  row.wall_seconds = r.wall_seconds;
  row.completed = r.completed;
  row.within_double = r.completed && (r.sup_h_norm <= 2.0 * eps);
  return row;
}

}  // namespace patchlab
