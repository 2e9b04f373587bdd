#pragma once

// Value types shared by every module. All information quantities are in nats.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "vceo/errors.hpp"

namespace vceo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Remote Gaussian source S observed through X_k = S + N_k, k = 1, 2.
struct SourceModel {
  double sigma_s2 = 1.0;
  double sigma_n1_2 = 1.0;
  double sigma_n2_2 = 1.0;

  /// Noise variance of encoder k (1 or 2).
  double noise(int k) const { return k == 1 ? sigma_n1_2 : sigma_n2_2; }

  bool valid() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    return ok(sigma_s2) && ok(sigma_n1_2) && ok(sigma_n2_2);
  }

  void validate() const {
    if (!valid()) throw DomainError("source model variances must be finite and > 0");
  }

  /// Var(S | X1, X2), the smallest distortion any receiver can reach.
  double remote_mmse() const {
    return 1.0 / (1.0 / sigma_s2 + 1.0 / sigma_n1_2 + 1.0 / sigma_n2_2);
  }

  bool operator==(const SourceModel&) const = default;
};

/// Degrees of freedom of the Gaussian test channel U_kl = X_k + W_kl.
///
/// w_kl is the variance of W_kl; a_k is the magnitude of the negative
/// covariance Cov(W_k1, W_k2) = -a_k. A w of +inf denotes an absent
/// description and is accepted by the closed forms but not by the joint
/// covariance assembly.
struct SchemeParams {
  double w11 = 1.0;
  double w12 = 1.0;
  double w21 = 1.0;
  double w22 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;

  double w(int k, int l) const {
    if (k == 1) return l == 1 ? w11 : w12;
    return l == 1 ? w21 : w22;
  }
  double& w(int k, int l) {
    if (k == 1) return l == 1 ? w11 : w12;
    return l == 1 ? w21 : w22;
  }
  double a(int k) const { return k == 1 ? a1 : a2; }
  double& a(int k) { return k == 1 ? a1 : a2; }

  bool all_finite() const {
    return std::isfinite(w11) && std::isfinite(w12) && std::isfinite(w21) &&
           std::isfinite(w22) && std::isfinite(a1) && std::isfinite(a2);
  }

  bool valid() const {
    for (int k = 1; k <= 2; ++k) {
      const double ak = a(k);
      if (!std::isfinite(ak) || ak < 0.0) return false;
      for (int l = 1; l <= 2; ++l) {
        const double wl = w(k, l);
        if (std::isnan(wl) || wl < 0.0) return false;
      }
      // K_w block PSD; inf * x with x > 0 is inf so absent descriptions pass.
      const double prod = w(k, 1) * w(k, 2);
      if (!(ak == 0.0 || prod >= ak * ak)) return false;
    }
    return true;
  }

  void validate() const {
    if (!valid()) {
      std::ostringstream os;
      os << "scheme parameters invalid (need w_kl >= 0, a_k >= 0, "
            "w_k1*w_k2 >= a_k^2): "
         << w11 << ' ' << w12 << ' ' << w21 << ' ' << w22 << ' ' << a1 << ' ' << a2;
      throw DomainError(os.str());
    }
  }

  bool operator==(const SchemeParams&) const = default;
};

/// Distortion targets of receivers 1, 2 and the central receiver 0.
struct DistortionTriple {
  double d1 = 0.5;
  double d2 = 0.5;
  double d0 = 0.25;

  double side(int l) const { return l == 1 ? d1 : d2; }

  bool positive() const {
    return std::isfinite(d1) && std::isfinite(d2) && std::isfinite(d0) && d1 > 0 &&
           d2 > 0 && d0 > 0;
  }

  /// 0 < D0 < min{D1, D2} and max{D1, D2} < sigma_S^2.
  bool valid_for(const SourceModel& m) const {
    return positive() && d0 < std::min(d1, d2) && std::max(d1, d2) < m.sigma_s2;
  }

  bool operator==(const DistortionTriple&) const = default;
};

/// Converse parameter vector (d11, d12, d21, d22, t1, t2).
struct BoundParams {
  double d11 = 0.0;
  double d12 = 0.0;
  double d21 = 0.0;
  double d22 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;

  double d(int k, int l) const {
    if (k == 1) return l == 1 ? d11 : d12;
    return l == 1 ? d21 : d22;
  }
  double& d(int k, int l) {
    if (k == 1) return l == 1 ? d11 : d12;
    return l == 1 ? d21 : d22;
  }
  double t(int k) const { return k == 1 ? t1 : t2; }
  double& t(int k) { return k == 1 ? t1 : t2; }

  bool operator==(const BoundParams&) const = default;
};

/// A nonnegative information value that may be unbounded.
struct Information {
  double nats = 0.0;
  bool infinite = false;

  static Information unbounded() { return {kInf, true}; }
  double value() const { return infinite ? kInf : nats; }
};

}  // namespace vceo
