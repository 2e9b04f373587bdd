#pragma once

// Reparametrized variances and the rational function g used to split F_k
// and to build a matching scheme.

#include <cmath>

#include "vceo/errors.hpp"
#include "vceo/types.hpp"

namespace vceo {

/// (alpha_k0, alpha_k1, alpha_k2). Entries are +inf when d = sN or t = 0.
struct AlphaTriple {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  bool finite() const { return std::isfinite(a0) && std::isfinite(a1) && std::isfinite(a2); }
};

namespace detail {

/// sN d / (sN - d), the auxiliary variance w with reduced variance d.
inline double alpha_of(double sigma_n2, double d) {
  if (d >= sigma_n2) return kInf;
  return sigma_n2 * d / (sigma_n2 - d);
}

}  // namespace detail

inline AlphaTriple alphas(double sigma_n2, double d1, double d2, double t) {
  if (!(sigma_n2 > 0.0) || !(d1 >= 0.0) || !(d2 >= 0.0) || !(t >= 0.0))
    throw DomainError("alphas: need sN > 0, d >= 0, t >= 0");
  const double e = std::exp(-2.0 * t);
  AlphaTriple out;
  // sN^2 e / (sN - sN e)
  out.a0 = t == 0.0 ? kInf : sigma_n2 * sigma_n2 * e / (sigma_n2 - sigma_n2 * e);
  out.a1 = detail::alpha_of(sigma_n2, d1);
  out.a2 = detail::alpha_of(sigma_n2, d2);
  return out;
}

/// g(beta) = 1/(alpha0 + beta) - 1/(alpha1 + beta) - 1/(alpha2 + beta).
inline double g_fn(const AlphaTriple& al, double beta) {
  if (!(beta >= 0.0)) throw DomainError("g_fn: beta must be >= 0");
  return 1.0 / (al.a0 + beta) - 1.0 / (al.a1 + beta) - 1.0 / (al.a2 + beta);
}

}  // namespace vceo
