#pragma once

// Bony-Weyl quantization on mode space: entry(j,k) of Op(a) is
// chi_delta((j-k)/<j+k>) a_{j-k}((j+k)/2), normalized so Op(1) = Id.
// Operators act on vectors indexed by signed modes -K..K.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "patchlab/dispersion.hpp"
#include "patchlab/fourier.hpp"

namespace patchlab {

// C^2 step: 0 below 0, 1 above 1, 6t^5 - 15t^4 + 10t^3 between.
inline double smoothstep_quintic(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// even cutoff: 1 on |x| <= 1.1, 0 on |x| >= 1.9, exactly
inline double chi_plateau(double x) {
  double ax = std::abs(x);
  if (ax <= 1.1) return 1.0;
  if (ax >= 1.9) return 0.0;
  return 1.0 - smoothstep_quintic((ax - 1.1) / 0.8);
}

inline double chi_delta(double x, double delta = 0.3) { return chi_plateau(x / delta); }

// low-frequency cutoff: 0 on |xi| <= 1/8, 1 on |xi| >= 1/4. On the
// half-integer quantization lattice it only kills xi = 0.
inline double psi_lowfreq(double xi) {
  return smoothstep_quintic((std::abs(xi) - 0.125) / 0.125);
}

// symbol a(x,xi) = sum_m a_m(xi) e^{imx}, band-limited in m
struct Symbol {
  long band = 0;
  std::function<cplx(long, double)> coeff;  // a_m(xi)

  cplx at(long m, double xi) const {
    if (std::labs(m) > band) return cplx(0.0);
    return coeff(m, xi);
  }
};

// a(x, xi) = u(x) g(xi) for a real field u
inline Symbol field_symbol(const Spectrum& u, std::function<double(double)> g) {
  long band = u.max_mode();
  return Symbol{band, [u, g](long m, double xi) { return u.coeff(m) * g(xi); }};
}

// conj(a(x,xi)) = a(x,-xi): the condition for Op(a) to map real to real
inline double conj_symmetry_defect(const Symbol& a, const std::vector<double>& probes) {
  double worst = 0.0;
  for (long m = -a.band; m <= a.band; ++m)
    for (double xi : probes)
      worst = std::max(worst, std::abs(a.at(-m, -xi) - std::conj(a.at(m, xi))));
  return worst;
}

struct ModeVector {
  long K = 0;
  Eigen::VectorXcd v;

  explicit ModeVector(long K_) : K(K_), v(Eigen::VectorXcd::Zero(2 * K_ + 1)) {}
  cplx& at(long j) { return v(K + j); }
  cplx at(long j) const { return v(K + j); }

  double hs_norm(double s) const {
    double acc = 0.0;
    for (long j = -K; j <= K; ++j)
      acc += std::pow(std::max(1.0, static_cast<double>(std::labs(j))), 2.0 * s) * std::norm(v(K + j));
    return std::sqrt(acc);
  }
};

struct ModeMatrix {
  long K = 0;
  Eigen::MatrixXcd a;

  explicit ModeMatrix(long K_) : K(K_), a(Eigen::MatrixXcd::Zero(2 * K_ + 1, 2 * K_ + 1)) {}
  cplx& at(long j, long k) { return a(K + j, K + k); }
  cplx at(long j, long k) const { return a(K + j, K + k); }

  static ModeMatrix identity(long K_) {
    ModeMatrix m(K_);
    m.a = Eigen::MatrixXcd::Identity(2 * K_ + 1, 2 * K_ + 1);
    return m;
  }

  ModeVector apply(const ModeVector& x) const {
    if (x.K != K) throw std::invalid_argument("ModeMatrix::apply: mode range mismatch");
    ModeVector y(K);
    y.v = a * x.v;
    return y;
  }
};

inline ModeMatrix bw_quantize(const Symbol& sym, long K, double delta = 0.3) {
  ModeMatrix A(K);
  for (long j = -K; j <= K; ++j)
    for (long k = -K; k <= K; ++k) {
      long m = j - k;
      if (std::labs(m) > sym.band) continue;
      double denom = std::max(1.0, static_cast<double>(std::labs(j + k)));
      double cd = chi_delta(static_cast<double>(m) / denom, delta);
      if (cd == 0.0) continue;
      A.at(j, k) = cd * sym.at(m, 0.5 * static_cast<double>(j + k));
    }
  return A;
}

inline ModeMatrix multiplier_matrix(long K, const std::function<double(long)>& m) {
  ModeMatrix M(K);
  for (long j = -K; j <= K; ++j) M.at(j, j) = m(j);
  return M;
}

// real-pairing transpose: entry(j,k) -> entry(-k,-j); equals Op(a(x,-xi))
inline ModeMatrix transpose_pairing(const ModeMatrix& A) {
  ModeMatrix B(A.K);
  for (long j = -A.K; j <= A.K; ++j)
    for (long k = -A.K; k <= A.K; ++k) B.at(j, k) = A.at(-k, -j);
  return B;
}

inline ModeMatrix adjoint(const ModeMatrix& A) {
  ModeMatrix B(A.K);
  B.a = A.a.adjoint();
  return B;
}

struct CommutatorCheck {
  std::vector<long> ks;
  std::vector<double> ratios;         // ||(C - P) e_k|| / ||P e_k||
  std::vector<double> decay_factors;  // ratios[i] / ratios[i+1]
};

// [Op(a), m(D)] against its predicted principal part
// (1/i) Op(-d_xi m * d_x a) for a(x,xi) = u(x) <xi>^{ord}, u = cos x.
inline CommutatorCheck commutator_order_check(const AlphaParam& ap, const std::vector<long>& ks,
                                              long K, double ord = 1.0) {
  for (long k : ks)
    if (k + 2 > K) throw std::invalid_argument("commutator_order_check: K too small for probe modes");
  Spectrum u(2 * static_cast<std::size_t>(K));  // only modes +-1 used
  u.c[1] = cplx(0.5, 0.0);
  auto bracket = [ord](double xi) { return std::pow(std::max(1.0, std::abs(xi)), ord); };
  Symbol a = field_symbol(u, bracket);
  a.band = 1;
  ModeMatrix A = bw_quantize(a, K);

  ModeMatrix C(K);
  for (long j = -K; j <= K; ++j)
    for (long k = -K; k <= K; ++k)
      C.at(j, k) = A.at(j, k) * (omega_dot(ap, static_cast<double>(k)) - omega_dot(ap, static_cast<double>(j)));

  Symbol p{1, [&ap, &u, bracket](long m, double xi) {
             // (1/i)(-m'(xi)) (i m) a_m(xi) = -m omega_dot'(xi) a_m(xi)
             return -static_cast<double>(m) * omega_dot_prime(ap, xi) * u.coeff(m) * bracket(xi);
           }};
  ModeMatrix P = bw_quantize(p, K);

  CommutatorCheck out;
  out.ks = ks;
  for (long k : ks) {
    ModeVector e(K);
    e.at(k) = cplx(1.0, 0.0);
    double resid = (C.a * e.v - P.a * e.v).norm();
    double prin = (P.a * e.v).norm();
    out.ratios.push_back(resid / prin);
  }
  for (std::size_t i = 0; i + 1 < out.ratios.size(); ++i)
    out.decay_factors.push_back(out.ratios[i] / out.ratios[i + 1]);
  return out;
}

// sup over random real probe vectors of ||Op(a) u||_s / ||u||_{s + ord}
inline double action_bound_probe(const Symbol& sym, long K, double s_order, double ord,
                                 int draws = 4, unsigned seed = 42) {
  ModeMatrix A = bw_quantize(sym, K);
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  double worst = 0.0;
  for (int d = 0; d < draws; ++d) {
    ModeVector u(K);
    u.at(0) = cplx(dist(gen), 0.0);
    for (long j = 1; j <= K; ++j) {
      cplx z(dist(gen), dist(gen));
      u.at(j) = z;
      u.at(-j) = std::conj(z);
    }
    ModeVector Au = A.apply(u);
    worst = std::max(worst, Au.hs_norm(s_order) / u.hs_norm(s_order + ord));
  }
  return worst;
}

// Transport flow: M'(tau) = Op(i b_tau(x) xi) M, b_tau = beta / (1 + tau beta_x),
// tau in [0,1], RK4 substeps. inverse integrates N' = -N Op(...) instead.
inline ModeMatrix flow_transport(const Spectrum& beta, long K, int substeps = 32,
                                 bool inverse = false) {
  std::size_t n = beta.n;
  Fft fft(n);
  std::vector<double> b = fft.synthesize(beta);
  std::vector<double> bp = fft.synthesize(derivative(beta));

  auto generator = [&](double tau) {
    std::vector<double> bt(n);
    for (std::size_t i = 0; i < n; ++i) {
      double den = 1.0 + tau * bp[i];
      if (den <= 0.0) throw std::runtime_error("flow_transport: characteristics crossed");
      bt[i] = b[i] / den;
    }
    Spectrum bs = fft.analyze(bt);
    Symbol g{bs.max_mode(), [bs](long m, double xi) { return bs.coeff(m) * cplx(0.0, xi); }};
    return bw_quantize(g, K);
  };

  ModeMatrix M = ModeMatrix::identity(K);
  double dtau = 1.0 / static_cast<double>(substeps);
  for (int i = 0; i < substeps; ++i) {
    double t0 = dtau * static_cast<double>(i);
    ModeMatrix G0 = generator(t0), Gh = generator(t0 + dtau / 2.0), G1 = generator(t0 + dtau);
    auto mult = [&](const ModeMatrix& G, const Eigen::MatrixXcd& X) {
      return inverse ? Eigen::MatrixXcd(-X * G.a) : Eigen::MatrixXcd(G.a * X);
    };
    Eigen::MatrixXcd k1 = mult(G0, M.a);
    Eigen::MatrixXcd k2 = mult(Gh, M.a + 0.5 * dtau * k1);
    Eigen::MatrixXcd k3 = mult(Gh, M.a + 0.5 * dtau * k2);
    Eigen::MatrixXcd k4 = mult(G1, M.a + dtau * k3);
    M.a += dtau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return M;
}

// smoothing conjugation: exact matrix exponential of a bounded generator
inline ModeMatrix flow_smoothing(const ModeMatrix& G) {
  ModeMatrix M(G.K);
  M.a = G.a.exp();
  return M;
}

}  // namespace patchlab
