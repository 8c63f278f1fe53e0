#pragma once

// Real 2pi-periodic fields on uniform grids and their Fourier coefficients.
// Convention: f(x) = sum_{|j| <= n/2} c_j e^{ijx}, c_j = (1/2pi) int f e^{-ijx} dx.
// Real fields are stored as half-spectra c_0..c_{n/2} with c_{-j} = conj(c_j).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace patchlab {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi_v<double>;

// Fourier coefficients of a real field sampled on n uniform points.
struct Spectrum {
  std::size_t n = 0;     // grid size the field lives on
  std::vector<cplx> c;   // c[j], j = 0..n/2

  Spectrum() = default;
  explicit Spectrum(std::size_t n_) : n(n_), c(n_ / 2 + 1, cplx(0.0)) {}

  long max_mode() const { return static_cast<long>(n / 2); }

  // coefficient at any signed mode, conjugate symmetry for j < 0
  cplx coeff(long j) const {
    long a = std::abs(j);
    if (a > max_mode()) return cplx(0.0);
    return j >= 0 ? c[a] : std::conj(c[a]);
  }
};

// FFTW r2c/c2r plans for one grid size. Move-only.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("Fft: grid size must be even and >= 4");
    rbuf_ = fftw_alloc_real(n);
    cbuf_ = fftw_alloc_complex(n / 2 + 1);
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), rbuf_, cbuf_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), cbuf_, rbuf_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("Fft: plan creation failed");
  }
  ~Fft() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    if (rbuf_) fftw_free(rbuf_);
    if (cbuf_) fftw_free(cbuf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }

  Spectrum analyze(const std::vector<double>& values) const {
    if (values.size() != n_)
      throw std::invalid_argument("Fft::analyze: value count != grid size");
    std::copy(values.begin(), values.end(), rbuf_);
    fftw_execute(fwd_);
    Spectrum s(n_);
    for (std::size_t j = 0; j <= n_ / 2; ++j)
      s.c[j] = cplx(cbuf_[j][0], cbuf_[j][1]) / static_cast<double>(n_);
    return s;
  }

  // Evaluates the trig polynomial on this grid; spec.n <= grid size (zero pad).
  std::vector<double> synthesize(const Spectrum& spec) const {
    if (spec.n > n_)
      throw std::invalid_argument("Fft::synthesize: spectrum finer than grid");
    std::size_t nc = n_ / 2 + 1;
    for (std::size_t j = 0; j < nc; ++j) {
      cplx v = (j < spec.c.size()) ? spec.c[j] : cplx(0.0);
      cbuf_[j][0] = v.real();
      cbuf_[j][1] = v.imag();
    }
    fftw_execute(bwd_);  // unnormalized c2r matches the 1/n in analyze
    return std::vector<double>(rbuf_, rbuf_ + n_);
  }

 private:
  std::size_t n_;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
  double* rbuf_ = nullptr;
  fftw_complex* cbuf_ = nullptr;
};

inline std::vector<double> grid_points(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
  return x;
}

// d/dx in mode space; Nyquist zeroed (its sign is ambiguous on the grid).
inline Spectrum derivative(const Spectrum& s) {
  Spectrum d = s;
  for (long j = 0; j <= s.max_mode(); ++j)
    d.c[j] *= cplx(0.0, static_cast<double>(j));
  d.c[s.n / 2] = cplx(0.0);
  return d;
}

// Applies a diagonal Fourier multiplier m(j). Reality of the result requires
// m(-j) = conj(m(j)); violations are rejected.
inline Spectrum apply_multiplier(const Spectrum& s, const std::function<cplx(long)>& m) {
  Spectrum out = s;
  for (long j = 0; j <= s.max_mode(); ++j) {
    cplx mp = m(j), mn = m(-j);
    if (std::abs(mn - std::conj(mp)) > 1e-12 * (1.0 + std::abs(mp)))
      throw std::invalid_argument("apply_multiplier: m(-j) != conj(m(j)), result not real");
    out.c[j] *= mp;
  }
  return out;
}

inline Spectrum project_zero_mean(const Spectrum& s) {
  Spectrum out = s;
  out.c[0] = cplx(0.0);
  return out;
}

// Zeroes modes |j| > n/3 (2/3 rule).
inline Spectrum dealias(const Spectrum& s) {
  Spectrum out = s;
  long cut = static_cast<long>(s.n) / 3;
  for (long j = cut + 1; j <= s.max_mode(); ++j) out.c[j] = cplx(0.0);
  return out;
}

// Sobolev norm with <j> = max(1, |j|). Nyquist carries weight 1, interior
// modes 2, so grid Parseval is exact at s = 0.
inline double hs_norm_sq(const Spectrum& s, double order) {
  double acc = std::norm(s.c[0]);
  for (long j = 1; j <= s.max_mode(); ++j) {
    double w = (static_cast<std::size_t>(j) == s.n / 2) ? 1.0 : 2.0;
    acc += w * std::pow(static_cast<double>(j), 2.0 * order) * std::norm(s.c[j]);
  }
  return acc;
}

inline double hs_norm(const Spectrum& s, double order) { return std::sqrt(hs_norm_sq(s, order)); }

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace patchlab
