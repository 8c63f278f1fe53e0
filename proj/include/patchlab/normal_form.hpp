#pragma once

// Quadratic normal form on mode space. Triad coefficients live on the
// convolution set k = n + j; the homological solve divides by the
// three-wave divisor in the drift-free law omega_dot.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "patchlab/dispersion.hpp"
#include "patchlab/fourier.hpp"
#include "patchlab/paradiff.hpp"

namespace patchlab {

struct Triad {
  long n = 0, j = 0, k = 0;
  cplx amp;
};

struct TriadBand {
  std::vector<Triad> entries;

  void add(long n, long j, long k, cplx amp) {
    if (k != n + j) throw std::invalid_argument("TriadBand: k must equal n + j");
    if (n == 0 || j == 0 || k == 0)
      throw std::invalid_argument("TriadBand: zero modes are excluded from the band");
    for (auto& t : entries)
      if (t.n == n && t.j == j && t.k == k) {
        t.amp += amp;
        return;
      }
    entries.push_back({n, j, k, amp});
  }

  cplx amp_at(long n, long j, long k) const {
    for (const auto& t : entries)
      if (t.n == n && t.j == j && t.k == k) return t.amp;
    return cplx(0.0);
  }

  // adds the conjugate partner (-n,-j,-k) of any entry missing it, so the
  // quadratic field maps real states to real states
  void ensure_reality() {
    std::vector<Triad> add_list;
    for (const auto& t : entries)
      if (t.amp != cplx(0.0) && amp_at(-t.n, -t.j, -t.k) == cplx(0.0))
        add_list.push_back({-t.n, -t.j, -t.k, std::conj(t.amp)});
    for (const auto& t : add_list) add(t.n, t.j, t.k, t.amp);
  }

  double reality_defect() const {
    double worst = 0.0;
    for (const auto& t : entries)
      worst = std::max(worst, std::abs(amp_at(-t.n, -t.j, -t.k) - std::conj(t.amp)));
    return worst;
  }

  long max_mode() const {
    long m = 0;
    for (const auto& t : entries)
      m = std::max({m, std::labs(t.n), std::labs(t.j), std::labs(t.k)});
    return m;
  }
};

// Q = -R / (i Delta), Delta = omega_dot(k) - omega_dot(j) - omega_dot(n).
inline TriadBand solve_homological(const TriadBand& R, const AlphaParam& ap,
                                   double divisor_floor = 1e-10) {
  TriadBand Q;
  for (const auto& t : R.entries) {
    double delta = omega_dot(ap, static_cast<double>(t.k)) -
                   omega_dot(ap, static_cast<double>(t.j)) -
                   omega_dot(ap, static_cast<double>(t.n));
    if (std::abs(delta) < divisor_floor)
      throw std::runtime_error("solve_homological: resonant triad, divisor below floor");
    Q.add(t.n, t.j, t.k, -t.amp / (cplx(0.0, 1.0) * delta));
  }
  return Q;
}

// max |Q i Delta + R| over the band, with omega_dot injectable so callers
// can recompute the divisor through an independent route
inline double homological_residual(const TriadBand& Q, const TriadBand& R,
                                   const std::function<double(long)>& omdot) {
  double worst = 0.0;
  for (const auto& t : R.entries) {
    cplx q = Q.amp_at(t.n, t.j, t.k);
    double delta = omdot(t.k) - omdot(t.j) - omdot(t.n);
    worst = std::max(worst, std::abs(q * cplx(0.0, delta) + t.amp));
  }
  return worst;
}

inline double homological_residual(const TriadBand& Q, const TriadBand& R, const AlphaParam& ap) {
  return homological_residual(Q, R, [&ap](long j) { return omega_dot(ap, static_cast<double>(j)); });
}

// transport generator: beta_j = -V_j / (i omega_dot(j)); V_0 must vanish
inline Spectrum solve_transport(const Spectrum& V, const AlphaParam& ap) {
  if (std::abs(V.c[0]) > 0.0)
    throw std::invalid_argument("solve_transport: mean-free transport coefficient required");
  Spectrum beta = V;
  beta.c[0] = cplx(0.0);
  for (long j = 1; j <= V.max_mode(); ++j)
    beta.c[j] = -V.c[j] / cplx(0.0, omega_dot(ap, static_cast<double>(j)));
  return beta;
}

inline double transport_residual(const Spectrum& V, const Spectrum& beta,
                                 const std::function<double(long)>& omdot) {
  double worst = 0.0;
  for (long j = 1; j <= V.max_mode(); ++j)
    worst = std::max(worst, std::abs(V.coeff(j) + cplx(0.0, omdot(j)) * beta.coeff(j)));
  return worst;
}

// paradifferential analogue: g_m(xi) = b_m(xi) / (i omega_dot(m)), b_0 = 0
inline Symbol symbol_generator(const Symbol& b, const AlphaParam& ap) {
  AlphaParam apc = ap;
  Symbol bb = b;
  return Symbol{b.band, [apc, bb](long m, double xi) {
                  if (m == 0) return cplx(0.0);
                  return bb.at(m, xi) / cplx(0.0, omega_dot(apc, static_cast<double>(m)));
                }};
}

inline double symbol_generator_residual(const Symbol& b, const Symbol& g, const AlphaParam& ap,
                                        const std::vector<double>& probes) {
  double worst = 0.0;
  for (long m = -b.band; m <= b.band; ++m) {
    if (m == 0) continue;
    for (double xi : probes)
      worst = std::max(worst, std::abs(b.at(m, xi) - cplx(0.0, omega_dot(ap, static_cast<double>(m))) *
                                                         g.at(m, xi)));
  }
  return worst;
}

// five interacting triads: generic enough that the cubic remainder of the
// conjugated flow is nonzero (a single triad cancels to machine floor)
inline TriadBand default_cancellation_band() {
  TriadBand b;
  b.add(1, 1, 2, cplx(1.0, 0.0));
  b.add(1, 2, 3, cplx(0.7, 0.0));
  b.add(2, 1, 3, cplx(0.4, 0.0));
  b.add(1, 3, 4, cplx(0.3, 0.0));
  b.add(2, 2, 4, cplx(0.5, 0.0));
  b.ensure_reality();
  return b;
}

// Synthetic quadratic model f' = -i omega_dot(D) f + B(f) f on modes |j| <= K,
// and the conjugation g = exp(Q(f)) f that removes the quadratic growth.
class CancellationExperiment {
 public:
  CancellationExperiment(const AlphaParam& ap, const TriadBand& band, long K)
      : ap_(ap), band_(band), K_(K) {
    if (band_.reality_defect() > 0.0)
      throw std::invalid_argument("CancellationExperiment: band must be reality-complete");
    if (band_.max_mode() > K)
      throw std::invalid_argument("CancellationExperiment: band exceeds mode cutoff");
    Q_ = solve_homological(band_, ap_);
    omd_.resize(2 * K + 1);
    for (long j = -K; j <= K; ++j) omd_[K + j] = omega_dot(ap_, static_cast<double>(j));
  }

  const TriadBand& homological_solution() const { return Q_; }

  Eigen::VectorXcd initial_state(double eps) const {
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(2 * K_ + 1);
    f(K_ + 1) = f(K_ + 2) = 0.5 * eps;
    f(K_ - 1) = f(K_ - 2) = 0.5 * eps;
    return f;
  }

  Eigen::VectorXcd rhs(const Eigen::VectorXcd& f) const {
    Eigen::VectorXcd out(2 * K_ + 1);
    for (long k = -K_; k <= K_; ++k) out(K_ + k) = cplx(0.0, -omd_[K_ + k]) * f(K_ + k);
    for (const auto& t : band_.entries) out(K_ + t.k) += t.amp * f(K_ + t.n) * f(K_ + t.j);
    return out;
  }

  Eigen::VectorXcd integrate(Eigen::VectorXcd f, double dt, int nsteps) const {
    for (int i = 0; i < nsteps; ++i) {
      Eigen::VectorXcd k1 = rhs(f);
      Eigen::VectorXcd k2 = rhs(f + 0.5 * dt * k1);
      Eigen::VectorXcd k3 = rhs(f + 0.5 * dt * k2);
      Eigen::VectorXcd k4 = rhs(f + dt * k3);
      f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return f;
  }

  Eigen::MatrixXcd qmat(const Eigen::VectorXcd& f) const {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * K_ + 1, 2 * K_ + 1);
    for (const auto& t : Q_.entries) M(K_ + t.k, K_ + t.j) += t.amp * f(K_ + t.n);
    return M;
  }

  double state_norm(const Eigen::VectorXcd& f, double s) const {
    double acc = 0.0;
    for (long j = -K_; j <= K_; ++j)
      acc += std::pow(std::max(1.0, static_cast<double>(std::labs(j))), 2.0 * s) * std::norm(f(K_ + j));
    return std::sqrt(acc);
  }

  // |d/dt ||g(t)||_s| at t = 0 by a 5-point stencil; g is either f itself
  // (conjugated = false) or exp(Q(f)) f
  double growth(double eps, bool conjugated, double s = 3.0, double fd_dt = 1e-3) const {
    auto norm_at = [&](int off) {
      Eigen::VectorXcd f = initial_state(eps);
      if (off != 0) f = integrate(f, off > 0 ? fd_dt : -fd_dt, std::abs(off));
      if (conjugated) f = (qmat(f).exp() * f).eval();
      return state_norm(f, s);
    };
    double vm2 = norm_at(-2), vm1 = norm_at(-1), vp1 = norm_at(1), vp2 = norm_at(2);
    return std::abs((vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / (12.0 * fd_dt));
  }

  static double fit_slope(const std::vector<double>& eps_list, const std::vector<double>& growths) {
    if (eps_list.size() != growths.size() || eps_list.size() < 2)
      throw std::invalid_argument("fit_slope: need matching lists, length >= 2");
    double xm = 0.0, ym = 0.0;
    std::size_t n = eps_list.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
      lx[i] = std::log(eps_list[i]);
      ly[i] = std::log(growths[i]);
      xm += lx[i];
      ym += ly[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (lx[i] - xm) * (ly[i] - ym);
      den += (lx[i] - xm) * (lx[i] - xm);
    }
    return num / den;
  }

 private:
  AlphaParam ap_;
  TriadBand band_;
  long K_;
  TriadBand Q_;
  std::vector<double> omd_;
};

}  // namespace patchlab
