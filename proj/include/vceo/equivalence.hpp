#pragma once

// Constructs, for a converse point p in P, a Gaussian scheme whose sum rate
// equals the lower-bound expression at p, and reports both sides.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "vceo/alpha.hpp"
#include "vceo/bound.hpp"
#include "vceo/gaussmodel.hpp"
#include "vceo/scheme.hpp"
#include "vceo/types.hpp"

namespace vceo {

/// Root of g in (0, sN] by bisection on the bracket [0, sN].
/// Requires g(0) > 0 and g(sN) <= 0.
inline double solve_a_star(double sigma_n2, const AlphaTriple& al) {
  const double g0 = g_fn(al, 0.0);
  const double gn = g_fn(al, sigma_n2);
  if (!(g0 > 0.0) || !(gn <= 0.0))
    throw DomainError("solve_a_star: need g(0) > 0 and g(sN) <= 0");
  double a = sigma_n2;
  if (gn != 0.0) {
    double lo = 0.0, hi = sigma_n2;
    while (hi - lo > 1e-14 * sigma_n2) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g_fn(al, mid);
      if (std::abs(gm) <= 1e-15 * (1.0 / (al.a0 + mid))) {
        lo = hi = mid;
        break;
      }
      (gm > 0.0 ? lo : hi) = mid;
    }
    a = 0.5 * (lo + hi);
  }
  if (al.a1 * al.a2 - a * a < -1e-12)
    throw std::logic_error("solve_a_star: root violates alpha1 alpha2 >= a^2");
  return a;
}

/// Which construction was used for encoder k.
enum class MatchCase { ZeroCrossing, Uncorrelated };

inline const char* to_string(MatchCase c) {
  return c == MatchCase::ZeroCrossing ? "case1(F_k1)" : "case2(F_k2)";
}

struct EquivalenceReport {
  double lhs = 0.0;   ///< r_1 + r_2 + 1/2 log(sS^2/(D1 D2)) at p and the chosen sZ
  double rhs = 0.0;   ///< r_1' + r_2' + I(U_k1;U_k2|S,Y_k) terms + 1/2 log(sS^2/(d1 d2))
  double diff = 0.0;  ///< |lhs - rhs|
  std::array<MatchCase, 2> cases{};
  SchemeParams params;
  std::array<double, 2> sigma_z2{};     ///< +inf encodes the s -> inf limit
  std::array<double, 2> cond_info{};    ///< I(U_k1;U_k2 | S, Y_k)
  std::array<double, 2> t_target{};     ///< t_k of p
  std::array<double, 2> t_achieved{};   ///< t'_k of the scheme
  std::array<double, 3> distortions{};  ///< delta_1, delta_2, delta_0
  bool meets_distortions = false;
};

namespace detail {

/// I(U_k1;U_k2 | S, Y_k) for Y_k = X_k + Z_k; only encoder k's parameters
/// matter. sZ = +inf drops Y_k from the conditioning; an absent description
/// carries no information.
inline double pair_conditional_info(const SourceModel& model, const SchemeParams& params, int k,
                                    double sigma_z2) {
  if (std::isinf(params.w(k, 1)) || std::isinf(params.w(k, 2))) return 0.0;
  SchemeParams local = params;
  const int other = 3 - k;
  local.w(other, 1) = local.w(other, 2) = 1.0;
  local.a(other) = 0.0;
  const Var u1 = u_var(k, 1), u2 = u_var(k, 2);
  if (std::isinf(sigma_z2)) {
    const LabeledCov cov = build_joint_cov(model, local);
    return conditional_mi(cov, {u1}, {u2}, {Var::S});
  }
  const LabeledCov cov = build_joint_cov(model, local, std::pair{sigma_z2, sigma_z2});
  return conditional_mi(cov, {u1}, {u2}, {Var::S, y_var(k)});
}

}  // namespace detail

/// Achievable decomposition r_1 + r_2 + sum_k I(U_k1;U_k2|S,Y_k)
/// + 1/2 log(sS^2/(delta_1 delta_2)), which equals the scheme's sum rate
/// for every sZ >= 0.
inline double achievable_decomposition(const SourceModel& model, const SchemeParams& params,
                                       std::array<double, 2> sigma_z2) {
  const MarginalParams mp = marginal_params(model, params);
  const double d1 = receiver_distortion(model, params, 1);
  const double d2 = receiver_distortion(model, params, 2);
  double v = 0.5 * std::log(model.sigma_s2 * model.sigma_s2 / (d1 * d2));
  for (int k = 1; k <= 2; ++k) {
    const double sz = sigma_z2[static_cast<std::size_t>(k - 1)];
    v += r_fn(model.noise(k), mp.dk(k, 1), mp.dk(k, 2), mp.tk(k).value(), sz);
    v += detail::pair_conditional_info(model, params, k, sz);
  }
  return v;
}

/// Builds the matching scheme for p in P (requires the theorem condition):
/// F_k1 -> a_k = root of g, w_kl = alpha_kl, sZ = a sN/(sN - a);
/// F_k2 -> a_k = 0, w_kl = alpha_kl, sZ = 0.
inline EquivalenceReport construct_matching_scheme(const SourceModel& model,
                                                   const DistortionTriple& targets,
                                                   const BoundParams& p) {
  model.validate();
  if (!targets.valid_for(model)) throw DomainError("construct: distortion targets not valid");
  if (!condition_holds(model, targets))
    throw DomainError("construct: distortion targets outside the theorem condition");
  if (in_P(model, targets, p) == PMembership::None)
    throw DomainError("construct: parameter point not in P");

  EquivalenceReport rep;
  for (int k = 1; k <= 2; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const double n2 = model.noise(k);
    const double d1 = std::min(p.d(k, 1), n2), d2 = std::min(p.d(k, 2), n2);
    const AlphaTriple al = alphas(n2, d1, d2, p.t(k));
    rep.t_target[i] = p.t(k);
    switch (classify_F_k(n2, d1, d2, p.t(k))) {
      case FClass::F1: {
        const double a = solve_a_star(n2, al);
        rep.cases[i] = MatchCase::ZeroCrossing;
        rep.params.a(k) = a;
        rep.sigma_z2[i] = a >= n2 ? kInf : a * n2 / (n2 - a);
        break;
      }
      case FClass::F2:
        rep.cases[i] = MatchCase::Uncorrelated;
        rep.params.a(k) = 0.0;
        rep.sigma_z2[i] = 0.0;
        break;
      case FClass::F3:
        throw std::logic_error("construct: slice in F_k3 under the theorem condition");
      case FClass::Outside:
        throw std::logic_error("construct: slice outside F_k");
    }
    rep.params.w(k, 1) = al.a1;
    rep.params.w(k, 2) = al.a2;
  }
  rep.params.validate();

  const MarginalParams mp = marginal_params(model, rep.params);
  for (int k = 1; k <= 2; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    rep.t_achieved[i] = mp.tk(k).value();
    rep.cond_info[i] = detail::pair_conditional_info(model, rep.params, k, rep.sigma_z2[i]);
  }
  rep.distortions = {receiver_distortion(model, rep.params, 1),
                     receiver_distortion(model, rep.params, 2),
                     central_distortion(model, rep.params)};
  constexpr double kDistTol = 1e-9;
  rep.meets_distortions = rep.distortions[0] <= targets.d1 * (1 + kDistTol) &&
                          rep.distortions[1] <= targets.d2 * (1 + kDistTol) &&
                          rep.distortions[2] <= targets.d0 * (1 + kDistTol);

  rep.lhs = 0.5 * std::log(model.sigma_s2 * model.sigma_s2 / (targets.d1 * targets.d2));
  for (int k = 1; k <= 2; ++k)
    rep.lhs += r_fn(model.noise(k), p.d(k, 1), p.d(k, 2), p.t(k),
                    rep.sigma_z2[static_cast<std::size_t>(k - 1)]);
  rep.rhs = achievable_decomposition(model, rep.params, rep.sigma_z2);
  rep.diff = std::abs(rep.lhs - rep.rhs);
  return rep;
}

}  // namespace vceo
