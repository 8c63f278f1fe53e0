#pragma once

// Contour dynamics of the radial patch boundary rho = sqrt(1 + 2 f(x)).
// The s-integral (s = y - x) is a uniform trapezoid sum over the fine grid
// (M = q N points), diagonal term dropped; sin(x - y) = -sin(s).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "patchlab/dispersion.hpp"
#include "patchlab/fourier.hpp"

namespace patchlab {

// D^{-alpha/2} with a sqrt chain when alpha is a multiple of 1/4
// (exponent a multiple of 1/8), std::pow otherwise.
struct KernelPow {
  double expo;
  int num8;  // exponent = -num8/8 when nonzero

  explicit KernelPow(double alpha) : expo(-alpha / 2.0) {
    double k8 = alpha * 4.0;
    num8 = (std::abs(k8 - std::round(k8)) < 1e-12) ? static_cast<int>(std::round(k8)) : 0;
    if (num8 < 1 || num8 > 7) num8 = 0;
  }

  // buf[0..len) := buf^expo elementwise
  void apply(double* buf, std::size_t len) const {
    switch (num8) {
      case 4:
        for (std::size_t i = 0; i < len; ++i) buf[i] = 1.0 / std::sqrt(buf[i]);
        return;
      case 2:
        for (std::size_t i = 0; i < len; ++i) buf[i] = 1.0 / std::sqrt(std::sqrt(buf[i]));
        return;
      case 1:
        for (std::size_t i = 0; i < len; ++i)
          buf[i] = 1.0 / std::sqrt(std::sqrt(std::sqrt(buf[i])));
        return;
      case 0:
        for (std::size_t i = 0; i < len; ++i) buf[i] = std::pow(buf[i], expo);
        return;
      default:
        for (std::size_t i = 0; i < len; ++i) {
          double s1 = std::sqrt(buf[i]), s2 = std::sqrt(s1);
          double acc = (num8 & 4) ? s1 : 1.0;
          if (num8 & 2) acc *= s2;
          if (num8 & 1) acc *= std::sqrt(s2);
          buf[i] = 1.0 / acc;
        }
        return;
    }
  }
};

struct Conserved {
  double momentum = 0.0;  // J = pi sum <f, f> over modes
  double area = 0.0;      // A = 2 pi f_0
  double energy = 0.0;    // interaction energy of the patch
};

inline std::vector<double> h_to_f_grid(const std::vector<double>& h) {
  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) f[i] = h[i] + 0.5 * h[i] * h[i];
  return f;
}

inline std::vector<double> f_to_h_grid(const std::vector<double>& f) {
  std::vector<double> h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double w = 1.0 + 2.0 * f[i];
    if (w <= 0.0) throw std::runtime_error("f_to_h: 1 + 2 f <= 0, radius lost positivity");
    h[i] = std::sqrt(w) - 1.0;
  }
  return h;
}

class ContourOps {
 public:
  ContourOps(const AlphaParam& p, std::size_t N, std::size_t M)
      : ap(p), N_(N), M_(M), kern_(p.alpha), fftN_(N), fftM_(M) {
    if (M % N != 0) throw std::invalid_argument("ContourOps: M must be a multiple of N");
    if (N < 8) throw std::invalid_argument("ContourOps: N too small");
    q_ = M / N;
    // mirror-filled trig tables: cs even, sn odd about m = M/2 exactly, so
    // symmetric sums cancel in floating point and the disc is stationary
    cs_.assign(M, 0.0);
    sn_.assign(M, 0.0);  // sn[m] = sin(x - y) = -sin(2 pi m / M)
    for (std::size_t m = 1; m < M / 2; ++m) {
      double s = 2.0 * pi * static_cast<double>(m) / static_cast<double>(M);
      cs_[m] = std::cos(s);
      sn_[m] = -std::sin(s);
      cs_[M - m] = cs_[m];
      sn_[M - m] = -sn_[m];
    }
    cs_[M / 2] = -1.0;  // s = pi; antisymmetry pins sin to exactly zero there
    sn_[M / 2] = 0.0;
    ry_.resize(M);
    rpy_.resize(M);
    dk_.resize(M);
  }

  const AlphaParam ap;
  std::size_t grid_n() const { return N_; }
  std::size_t grid_m() const { return M_; }
  const Fft& fft_n() const { return fftN_; }

  // gradient of the interaction energy, sampled on the coarse grid
  std::vector<double> grad_energy(const Spectrum& f) const {
    if (f.n != N_) throw std::invalid_argument("grad_energy: spectrum grid mismatch");
    std::vector<double> fM = fftM_.synthesize(f);
    std::vector<double> fpM = fftM_.synthesize(derivative(f));
    std::vector<double> r(M_), rp(M_);
    radius(fM, fpM, r, rp);

    const double A = ap.c_alpha / (2.0 - ap.alpha);
    std::vector<double> g(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      std::size_t base = q_ * i;
      double rx = r[base];
      gather(r, rp, base);
      fill_kernel(rx);
      const double* ry = ry_.data();
      const double* rpy = rpy_.data();
      const double* K = dk_.data();
      double acc = 0.0;
      for (std::size_t m = 1; m < M_; ++m)
        acc += (ry[m] * ry[m] - rx * ry[m] * cs_[m] + rx * rpy[m] * sn_[m]) * K[m];
      g[i] = A / static_cast<double>(M_) * acc;
    }
    return g;
  }

  // Hamiltonian right-hand side: f_t = d/dx grad_energy(f), band-limited.
  Spectrum rhs_f(const Spectrum& f) const {
    Spectrum G = fftN_.analyze(grad_energy(f));
    return derivative(dealias(G));
  }

  // radial form: h_t, same quadrature on R = 1 + h
  std::vector<double> rhs_h(const std::vector<double>& h) const {
    if (h.size() != N_) throw std::invalid_argument("rhs_h: grid mismatch");
    Spectrum hs = fftN_.analyze(h);
    std::vector<double> hM = fftM_.synthesize(hs);
    std::vector<double> hpM = fftM_.synthesize(derivative(hs));
    std::vector<double> R(M_);
    for (std::size_t m = 0; m < M_; ++m) {
      R[m] = 1.0 + hM[m];
      if (R[m] <= 0.0) throw std::runtime_error("rhs_h: radius 1 + h lost positivity");
    }
    std::vector<double> out(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      std::size_t base = q_ * i;
      double Rx = R[base], hpx = hpM[base];
      gather(R, hpM, base);
      fill_kernel_h(Rx);
      const double* Ry = ry_.data();
      const double* hpy = rpy_.data();
      const double* K = dk_.data();
      double acc = 0.0;
      for (std::size_t m = 1; m < M_; ++m) {
        double i1 = cs_[m] * (Rx * hpy[m] - Ry[m] * hpx);
        double i2 = sn_[m] * (Rx * Ry[m] + hpx * hpy[m]);
        acc += (i1 + i2) * K[m];
      }
      out[i] = ap.c_alpha / static_cast<double>(M_) * acc / Rx;
    }
    return out;
  }

  Conserved conserved(const Spectrum& f) const {
    Conserved c;
    c.momentum = pi * hs_norm_sq(f, 0.0);
    c.area = 2.0 * pi * f.c[0].real();
    c.energy = energy(f);
    return c;
  }

  double energy(const Spectrum& f) const {
    if (f.n != N_) throw std::invalid_argument("energy: spectrum grid mismatch");
    std::vector<double> fM = fftM_.synthesize(f);
    std::vector<double> fpM = fftM_.synthesize(derivative(f));
    std::vector<double> r(M_), rp(M_);
    radius(fM, fpM, r, rp);

    double acc = 0.0;
    for (std::size_t i = 0; i < N_; ++i) {
      std::size_t base = q_ * i;
      double rx = r[base], rpx = rp[base];
      gather(r, rp, base);
      fill_kernel(rx);
      const double* ry = ry_.data();
      const double* rpy = rpy_.data();
      const double* K = dk_.data();
      double sum = 0.0;
      for (std::size_t m = 1; m < M_; ++m) {
        double P = rpx * rpy[m] * cs_[m] + (rpx * ry[m] - rx * rpy[m]) * sn_[m] + rx * ry[m] * cs_[m];
        double Dm = rx * rx + ry[m] * ry[m] - 2.0 * rx * ry[m] * cs_[m];
        sum += P * K[m] * Dm;  // K D = D^{1 - alpha/2}
      }
      acc += sum;
    }
    return -ap.c_alpha / (8.0 * (1.0 - ap.alpha / 2.0) * (1.0 - ap.alpha / 2.0)) * acc /
           (static_cast<double>(N_) * static_cast<double>(M_));
  }

 private:
  std::size_t N_, M_, q_;
  KernelPow kern_;
  Fft fftN_, fftM_;
  std::vector<double> cs_, sn_;
  mutable std::vector<double> ry_, rpy_, dk_;  // per-x scratch; not thread safe

  void radius(const std::vector<double>& fM, const std::vector<double>& fpM,
              std::vector<double>& r, std::vector<double>& rp) const {
    for (std::size_t m = 0; m < M_; ++m) {
      double w = 1.0 + 2.0 * fM[m];
      if (w <= 0.0) throw std::runtime_error("contour geometry: 1 + 2 f lost positivity");
      r[m] = std::sqrt(w);
      rp[m] = fpM[m] / r[m];
    }
  }

  // ry_[m], rpy_[m] = values at y = x + s_m, wrap split into two runs
  void gather(const std::vector<double>& a, const std::vector<double>& b, std::size_t base) const {
    std::size_t len1 = M_ - base;
    for (std::size_t m = 1; m < len1; ++m) {
      ry_[m] = a[base + m];
      rpy_[m] = b[base + m];
    }
    for (std::size_t m = (len1 > 1 ? len1 : 1); m < M_; ++m) {
      ry_[m] = a[base + m - M_];
      rpy_[m] = b[base + m - M_];
    }
  }

  void fill_kernel(double rx) const {
    double dmin = 1e300;
    for (std::size_t m = 1; m < M_; ++m) {
      double D = rx * rx + ry_[m] * ry_[m] - 2.0 * rx * ry_[m] * cs_[m];
      dk_[m] = D;
      dmin = std::min(dmin, D);
    }
    if (dmin <= 1e-30)
      throw std::runtime_error("contour geometry: chord distance collapsed off the diagonal");
    kern_.apply(dk_.data() + 1, M_ - 1);
  }

  void fill_kernel_h(double Rx) const {
    double dmin = 1e300;
    for (std::size_t m = 1; m < M_; ++m) {
      double D = Rx * Rx + ry_[m] * ry_[m] - 2.0 * Rx * ry_[m] * cs_[m];
      dk_[m] = D;
      dmin = std::min(dmin, D);
    }
    if (dmin <= 1e-30)
      throw std::runtime_error("contour geometry: chord distance collapsed off the diagonal");
    kern_.apply(dk_.data() + 1, M_ - 1);
  }
};

// Complex linearization of rhs_f about the disc, columns from central
// differences on cos/sin perturbations of each mode.
struct DiscLinearization {
  std::vector<cplx> diag;      // diag[j-1] ~ -i omega(j), j = 1..jmax
  double max_offdiag = 0.0;    // largest leaked entry across all columns
};

inline DiscLinearization linearization_at_disc(const ContourOps& ops, long jmax,
                                               double fd_eps = 1e-6) {
  long half = static_cast<long>(ops.grid_n()) / 2;
  if (jmax < 1 || jmax > half) throw std::invalid_argument("linearization_at_disc: bad jmax");
  DiscLinearization out;
  out.diag.resize(jmax);
  for (long j = 1; j <= jmax; ++j) {
    Spectrum pc(ops.grid_n()), ps(ops.grid_n());
    pc.c[j] = cplx(0.5 * fd_eps, 0.0);          // eps cos(jx)
    ps.c[j] = cplx(0.0, -0.5 * fd_eps);         // eps sin(jx)
    Spectrum mc = pc, ms = ps;
    for (auto& v : mc.c) v = -v;
    for (auto& v : ms.c) v = -v;
    Spectrum rc_p = ops.rhs_f(pc), rc_m = ops.rhs_f(mc);
    Spectrum rs_p = ops.rhs_f(ps), rs_m = ops.rhs_f(ms);
    for (long k = -half; k <= half; ++k) {
      cplx col_c = (rc_p.coeff(k) - rc_m.coeff(k)) / (2.0 * fd_eps);
      cplx col_s = (rs_p.coeff(k) - rs_m.coeff(k)) / (2.0 * fd_eps);
      cplx entry = col_c + cplx(0.0, 1.0) * col_s;  // action on e^{ijx}
      if (k == j)
        out.diag[j - 1] = entry;
      else
        out.max_offdiag = std::max(out.max_offdiag, std::abs(entry));
    }
  }
  return out;
}

}  // namespace patchlab
