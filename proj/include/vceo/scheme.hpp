#pragma once

// Gaussian achievable scheme: closed-form distortions and marginal
// parameters, the sum-rate objective, and explicit binning rate tuples.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vceo/gaussmodel.hpp"
#include "vceo/types.hpp"

namespace vceo {

namespace detail {

inline void check_index(int i, const char* what) {
  if (i != 1 && i != 2) throw DomainError(std::string(what) + " must be 1 or 2");
}

/// Var(X_k | U_kl, S) = sigma_N^2 w / (sigma_N^2 + w); sigma_N^2 when w = inf.
inline double reduced_variance(double sigma_n2, double w) {
  if (std::isinf(w)) return sigma_n2;
  return sigma_n2 * w / (sigma_n2 + w);
}

/// Variance of the scalar noise equivalent to observing X_k through both
/// descriptions of encoder k: 1 / (1^T K_w^{-1} 1) = (w1 w2 - a^2)/(w1 + w2 + 2a).
inline double equivalent_noise(double w1, double w2, double a) {
  if (std::isinf(w1) && std::isinf(w2)) return kInf;
  if (std::isinf(w1)) return w2;
  if (std::isinf(w2)) return w1;
  const double det = w1 * w2 - a * a;
  const double s = w1 + w2 + 2.0 * a;
  if (det <= 0.0 || s <= 0.0) return 0.0;
  return det / s;
}

}  // namespace detail

/// Closed-form Var(S | U_1l, U_2l):
/// 1/delta_l = 1/sS + 1/sN1 + 1/sN2 - d'_1l/sN1^2 - d'_2l/sN2^2.
inline double receiver_distortion(const SourceModel& model, const SchemeParams& params, int l) {
  detail::check_index(l, "receiver index");
  model.validate();
  params.validate();
  double inv = 1.0 / model.sigma_s2;
  for (int k = 1; k <= 2; ++k) {
    const double n2 = model.noise(k);
    inv += 1.0 / n2 - detail::reduced_variance(n2, params.w(k, l)) / (n2 * n2);
  }
  return 1.0 / inv;
}

/// Marginal parameters (d'_kl, t'_k) of a scheme. e^{-2t'_k} is kept
/// alongside t'_k so that the PSD boundary (t' = inf) stays exact.
struct MarginalParams {
  std::array<double, 4> d{};  ///< d'_11, d'_12, d'_21, d'_22
  std::array<Information, 2> t{};
  std::array<double, 2> exp_neg_2t{};

  double dk(int k, int l) const { return d[static_cast<std::size_t>(2 * (k - 1) + (l - 1))]; }
  const Information& tk(int k) const { return t[static_cast<std::size_t>(k - 1)]; }
  double ek(int k) const { return exp_neg_2t[static_cast<std::size_t>(k - 1)]; }

  bool finite() const { return !t[0].infinite && !t[1].infinite; }

  BoundParams to_bound_params() const {
    if (!finite()) throw DomainError("marginal parameters have unbounded t'");
    return {d[0], d[1], d[2], d[3], t[0].nats, t[1].nats};
  }
};

inline MarginalParams marginal_params(const SourceModel& model, const SchemeParams& params) {
  model.validate();
  params.validate();
  MarginalParams out;
  for (int k = 1; k <= 2; ++k) {
    const double n2 = model.noise(k);
    for (int l = 1; l <= 2; ++l)
      out.d[static_cast<std::size_t>(2 * (k - 1) + (l - 1))] =
          detail::reduced_variance(n2, params.w(k, l));
    const double v = detail::equivalent_noise(params.w(k, 1), params.w(k, 2), params.a(k));
    auto& t = out.t[static_cast<std::size_t>(k - 1)];
    auto& e = out.exp_neg_2t[static_cast<std::size_t>(k - 1)];
    if (v == 0.0) {
      t = Information::unbounded();
      e = 0.0;
    } else if (std::isinf(v)) {
      t = {0.0, false};
      e = 1.0;
    } else {
      // 1/2 log[(sN (w1+w2+2a) + w1 w2 - a^2) / (w1 w2 - a^2)] = 1/2 log(1 + sN / v)
      t = {0.5 * std::log1p(n2 / v), false};
      e = v / (v + n2);
    }
  }
  return out;
}

/// Closed-form Var(S | U11, U12, U21, U22):
/// 1/delta_0 = 1/sS + sum_k (1 - e^{-2 t'_k}) / sN_k.
inline double central_distortion(const SourceModel& model, const SchemeParams& params) {
  const MarginalParams mp = marginal_params(model, params);
  double inv = 1.0 / model.sigma_s2;
  for (int k = 1; k <= 2; ++k) inv += (1.0 - mp.ek(k)) / model.noise(k);
  return 1.0 / inv;
}

/// Sum-rate terms of the scheme, and per-link rates when a tuple was requested.
struct RateBreakdown {
  double sum_rate = 0.0;
  double term_mi_joint = 0.0;  ///< I(X1,X2; U11,U12,U21,U22)
  double term_mi_cross = 0.0;  ///< I(U11,U21; U12,U22)
  std::optional<std::array<double, 4>> rates;      ///< R11, R12, R21, R22
  std::optional<std::array<double, 4>> pre_rates;  ///< R'11, R'12, R'21, R'22
  double slack = 0.0;                              ///< delta of the tuple, 0 otherwise

  static std::size_t link(int k, int l) { return static_cast<std::size_t>(2 * (k - 1) + (l - 1)); }
};

inline RateBreakdown sum_rate(const SourceModel& model, const SchemeParams& params) {
  const LabeledCov cov = build_joint_cov(model, params);
  RateBreakdown out;
  out.term_mi_joint =
      gaussian_mi(cov, {Var::X1, Var::X2}, {Var::U11, Var::U12, Var::U21, Var::U22});
  out.term_mi_cross = gaussian_mi(cov, {Var::U11, Var::U21}, {Var::U12, Var::U22});
  out.sum_rate = out.term_mi_joint + out.term_mi_cross;
  return out;
}

/// Explicit rate tuple that meets every covering and binning constraint with
/// slack epsilon = delta / 8 and sums to the sum rate plus delta.
inline RateBreakdown rate_tuple(const SourceModel& model, const SchemeParams& params, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("rate slack must be > 0");
  RateBreakdown out = sum_rate(model, params);
  const LabeledCov cov = build_joint_cov(model, params);
  const double eps = delta / 8.0;

  std::array<double, 4> pre{};
  std::array<double, 4> rates{};
  for (int k = 1; k <= 2; ++k) {
    const Var x = x_var(k), u1 = u_var(k, 1), u2 = u_var(k, 2);
    pre[RateBreakdown::link(k, 1)] = gaussian_mi(cov, {x}, {u1}) + eps;
    pre[RateBreakdown::link(k, 2)] =
        conditional_mi(cov, {x}, {u2}, {u1}) + gaussian_mi(cov, {u1}, {u2}) + eps;
  }
  for (int l = 1; l <= 2; ++l) {
    const double shared = gaussian_mi(cov, {u_var(1, l)}, {u_var(2, l)});
    rates[RateBreakdown::link(1, l)] = pre[RateBreakdown::link(1, l)] - shared + eps;
    rates[RateBreakdown::link(2, l)] = pre[RateBreakdown::link(2, l)] + eps;
  }
  out.pre_rates = pre;
  out.rates = rates;
  out.slack = delta;
  return out;
}

/// One covering or binning inequality `lhs > rhs`, re-evaluated from the joint law.
struct RateConstraint {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict() const { return lhs > rhs; }
};

/// The twelve rate constraints a tuple must meet: three covering constraints
/// per encoder and three binning constraints per receiver.
inline std::vector<RateConstraint> rate_constraints(const SourceModel& model,
                                                    const SchemeParams& params,
                                                    const RateBreakdown& tuple) {
  if (!tuple.rates || !tuple.pre_rates) throw DomainError("breakdown carries no rate tuple");
  const LabeledCov cov = build_joint_cov(model, params);
  const auto& rp = *tuple.pre_rates;
  const auto& r = *tuple.rates;
  auto L = RateBreakdown::link;
  std::vector<RateConstraint> out;
  for (int k = 1; k <= 2; ++k) {
    const Var x = x_var(k), u1 = u_var(k, 1), u2 = u_var(k, 2);
    const std::string kk = std::to_string(k);
    out.push_back({"R'" + kk + "1 > I(X" + kk + ";U" + kk + "1)", rp[L(k, 1)],
                   gaussian_mi(cov, {x}, {u1})});
    out.push_back({"R'" + kk + "2 > I(X" + kk + ";U" + kk + "2)", rp[L(k, 2)],
                   gaussian_mi(cov, {x}, {u2})});
    out.push_back({"R'" + kk + "1 + R'" + kk + "2 > I(X;U,U) + I(U;U)",
                   rp[L(k, 1)] + rp[L(k, 2)],
                   gaussian_mi(cov, {x}, {u1, u2}) + gaussian_mi(cov, {u1}, {u2})});
  }
  for (int l = 1; l <= 2; ++l) {
    const std::string ll = std::to_string(l);
    const double shared = gaussian_mi(cov, {u_var(1, l)}, {u_var(2, l)});
    out.push_back({"R1" + ll + " > R'1" + ll + " - I(U1" + ll + ";U2" + ll + ")", r[L(1, l)],
                   rp[L(1, l)] - shared});
    out.push_back({"R2" + ll + " > R'2" + ll + " - I(U1" + ll + ";U2" + ll + ")", r[L(2, l)],
                   rp[L(2, l)] - shared});
    out.push_back({"R1" + ll + " + R2" + ll + " > R'1" + ll + " + R'2" + ll + " - I(U;U)",
                   r[L(1, l)] + r[L(2, l)], rp[L(1, l)] + rp[L(2, l)] - shared});
  }
  return out;
}

}  // namespace vceo
