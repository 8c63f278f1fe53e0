#pragma once

// Linear dispersion law of the rotating patch: omega(j) = j (V - C Lambda_|j|)
// with Lambda_r = Gamma(alpha/2 + r) / Gamma(1 - alpha/2 + r). Mode 1 is the
// translation direction, so omega(1) = 0 by construction (V = C Lambda_1).

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

namespace patchlab {

// Gamma-ratio Lambda_r, any real r >= 0, lgamma route.
inline double lambda_ratio(double alpha, double r) {
  return std::exp(std::lgamma(alpha / 2.0 + r) - std::lgamma(1.0 - alpha / 2.0 + r));
}

// d/dr Lambda_r via digamma.
inline double lambda_ratio_prime(double alpha, double r) {
  return lambda_ratio(alpha, r) *
         (boost::math::digamma(alpha / 2.0 + r) - boost::math::digamma(1.0 - alpha / 2.0 + r));
}

struct AlphaParam {
  double alpha;
  double c_alpha;  // kernel strength Gamma(a/2) / (2^{1-a} Gamma(1-a/2))
  double C_alpha;  // dispersion normalization
  double V_alpha;  // rotation-frame drift, V = C Lambda_1

  explicit AlphaParam(double a) : alpha(a) {
    if (!(a > 0.0 && a < 2.0) || a == 1.0)
      throw std::invalid_argument(
          "alpha = " + std::to_string(a) + " is outside (0,1) u (1,2); the endpoints and alpha = 1 are excluded");
    c_alpha = std::exp(std::lgamma(a / 2.0) - (1.0 - a) * std::log(2.0) - std::lgamma(1.0 - a / 2.0));
    C_alpha = c_alpha / (2.0 * (1.0 - a / 2.0)) / (1.0 - a) *
              std::exp(std::lgamma(3.0 - a) - std::lgamma(1.0 - a / 2.0) - std::lgamma(a / 2.0));
    V_alpha = C_alpha * lambda_ratio(a, 1.0);
  }
};

inline double omega(const AlphaParam& ap, double j) {
  if (j == 0.0) return 0.0;
  return j * (ap.V_alpha - ap.C_alpha * lambda_ratio(ap.alpha, std::abs(j)));
}

// omega with the linear drift removed: omega_dot = omega - V j = -C j Lambda_|j|.
inline double omega_dot(const AlphaParam& ap, double j) {
  if (j == 0.0) return 0.0;
  return -ap.C_alpha * j * lambda_ratio(ap.alpha, std::abs(j));
}

// d/dxi omega_dot, even in xi, smooth across 0.
inline double omega_dot_prime(const AlphaParam& ap, double xi) {
  double r = std::abs(xi);
  return -ap.C_alpha * (lambda_ratio(ap.alpha, r) + r * lambda_ratio_prime(ap.alpha, r));
}

// Cached omega / omega_dot on integer modes 0..jmax, odd extension.
struct DispersionTable {
  AlphaParam ap;
  std::vector<double> om, omdot;

  DispersionTable(const AlphaParam& p, std::size_t jmax) : ap(p), om(jmax + 1), omdot(jmax + 1) {
    for (std::size_t j = 0; j <= jmax; ++j) {
      om[j] = omega(p, static_cast<double>(j));
      omdot[j] = omega_dot(p, static_cast<double>(j));
    }
  }

  long jmax() const { return static_cast<long>(om.size()) - 1; }
  double om_at(long j) const {
    double v = om.at(static_cast<std::size_t>(std::labs(j)));
    return j >= 0 ? v : -v;
  }
  double omdot_at(long j) const {
    double v = omdot.at(static_cast<std::size_t>(std::labs(j)));
    return j >= 0 ? v : -v;
  }
};

// omega(k) - omega(j) - omega(n) on the convolution constraint k = j + n.
// Identical whether evaluated through omega or omega_dot (the drift cancels).
inline double three_wave_divisor(const AlphaParam& ap, long n, long j, long k) {
  if (k != n + j) throw std::invalid_argument("three_wave_divisor: requires k = n + j");
  return omega(ap, static_cast<double>(k)) - omega(ap, static_cast<double>(j)) -
         omega(ap, static_cast<double>(n));
}

inline double three_wave_divisor_dot(const AlphaParam& ap, long n, long j, long k) {
  if (k != n + j) throw std::invalid_argument("three_wave_divisor_dot: requires k = n + j");
  return omega_dot(ap, static_cast<double>(k)) - omega_dot(ap, static_cast<double>(j)) -
         omega_dot(ap, static_cast<double>(n));
}

struct ResonanceScan {
  double floor = 0.0;          // min |divisor| over the scanned set
  long n = 0, j = 0, k = 0;    // a triple attaining it
  std::vector<double> per_k;   // per_k[k] = min over that k (index 0,1 unused)
};

// Scans k = j + n, 2 <= k <= kmax, n and j nonzero with |n|,|j| <= kmax.
inline ResonanceScan resonance_scan(const AlphaParam& ap, long kmax) {
  if (kmax < 2) throw std::invalid_argument("resonance_scan: kmax must be >= 2");
  ResonanceScan out;
  out.per_k.assign(kmax + 1, 0.0);
  bool first = true;
  for (long k = 2; k <= kmax; ++k) {
    double wk = omega(ap, static_cast<double>(k));
    bool kfirst = true;
    for (long n = -kmax; n <= kmax; ++n) {
      long j = k - n;
      if (n == 0 || j == 0 || std::labs(j) > kmax) continue;
      double d = std::abs(wk - omega(ap, static_cast<double>(j)) - omega(ap, static_cast<double>(n)));
      if (kfirst || d < out.per_k[k]) {
        out.per_k[k] = d;
        kfirst = false;
      }
      if (first || d < out.floor) {
        out.floor = d;
        out.n = n;
        out.j = j;
        out.k = k;
        first = false;
      }
    }
  }
  return out;
}

}  // namespace patchlab
