#pragma once

// Converse side: the per-encoder function r_k, the parameter sets
// F_k / F / P1 / P2, projection onto P, the theorem condition, and the
// inf-sup lower bound on the sum rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vceo/alpha.hpp"
#include "vceo/detail/nelder_mead.hpp"
#include "vceo/errors.hpp"
#include "vceo/types.hpp"

namespace vceo {

inline constexpr double kMembershipTol = 1e-9;

/// (d1, d2, t) in F_k: sN e^{-2t} <= min{d1, d2}, max{d1, d2} <= sN, all >= 0.
inline bool in_F_k(double sigma_n2, double d1, double d2, double t, double rel_tol = 1e-12) {
  if (!(d1 >= 0.0 && d2 >= 0.0 && t >= 0.0)) return false;
  const double slack = rel_tol * sigma_n2;
  return sigma_n2 * std::exp(-2.0 * t) <= std::min(d1, d2) + slack &&
         std::max(d1, d2) <= sigma_n2 + slack;
}

/// r_k(d1, d2, t, sZ) = t + 1/2 log[(sN + sZ) / ((d1 + sZ)(d2 + sZ))]
///                        + 1/2 log(sN e^{-2t} + sZ).
/// sZ = +inf evaluates the limit t.
inline double r_fn(double sigma_n2, double d1, double d2, double t, double sigma_z2) {
  if (!(sigma_n2 > 0.0)) throw DomainError("r_fn: sN must be > 0");
  if (!(sigma_z2 >= 0.0)) throw DomainError("r_fn: sZ must be >= 0");
  if (!in_F_k(sigma_n2, d1, d2, t)) throw DomainError("r_fn: (d1, d2, t) outside F_k");
  if (std::isinf(sigma_z2)) return t;
  if (std::isinf(t)) return kInf;
  const double c = sigma_n2 * std::exp(-2.0 * t);
  return t + 0.5 * (std::log(sigma_n2 + sigma_z2) - std::log(d1 + sigma_z2) -
                    std::log(d2 + sigma_z2) + std::log(c + sigma_z2));
}

/// 1/D1 + 1/D2 - max{1/sN1, 1/sN2} - 1/sS >= 1/D0.
inline bool condition_holds(const SourceModel& model, const DistortionTriple& targets) {
  const double lhs = 1.0 / targets.d1 + 1.0 / targets.d2 -
                     std::max(1.0 / model.sigma_n1_2, 1.0 / model.sigma_n2_2) -
                     1.0 / model.sigma_s2;
  return lhs >= 1.0 / targets.d0;
}

enum class FClass { F1, F2, F3, Outside };

inline const char* to_string(FClass c) {
  switch (c) {
    case FClass::F1: return "F_k1";
    case FClass::F2: return "F_k2";
    case FClass::F3: return "F_k3";
    case FClass::Outside: return "outside F_k";
  }
  return "?";
}

/// Splits F_k by the signs of g(0) and g(sN). g(sN) > 0 is reported as F_k3
/// first; F_k2 and F_k3 never overlap (g(sN) > 0 forces g(0) > 0).
inline FClass classify_F_k(double sigma_n2, double d1, double d2, double t) {
  if (!in_F_k(sigma_n2, d1, d2, t)) return FClass::Outside;
  const AlphaTriple al = alphas(sigma_n2, std::min(d1, sigma_n2), std::min(d2, sigma_n2), t);
  if (g_fn(al, sigma_n2) > 0.0) return FClass::F3;
  if (g_fn(al, 0.0) <= 0.0) return FClass::F2;
  return FClass::F1;
}

namespace detail {

/// K_l = 1/sS + 1/sN1 + 1/sN2 - 1/D_l; receiver-l constraint is
/// d_1l/sN1^2 + d_2l/sN2^2 <= K_l.
inline double side_budget(const SourceModel& m, const DistortionTriple& tg, int l) {
  return 1.0 / m.sigma_s2 + 1.0 / m.sigma_n1_2 + 1.0 / m.sigma_n2_2 - 1.0 / tg.side(l);
}

/// 1/sS + sum_k (1 - e_k)/sN_k with e_k = e^{-2 t_k}.
inline double central_precision(const SourceModel& m, double e1, double e2) {
  return 1.0 / m.sigma_s2 + (1.0 - e1) / m.sigma_n1_2 + (1.0 - e2) / m.sigma_n2_2;
}

inline double side_precision(const SourceModel& m, const BoundParams& p, int l) {
  const double n1 = m.sigma_n1_2, n2 = m.sigma_n2_2;
  return 1.0 / m.sigma_s2 + 1.0 / n1 + 1.0 / n2 - p.d(1, l) / (n1 * n1) - p.d(2, l) / (n2 * n2);
}

inline bool rel_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline bool rel_leq(double a, double b, double tol) {
  return a <= b + tol * std::max(std::abs(a), std::abs(b));
}

inline double e_of(double t) { return std::exp(-2.0 * t); }
inline double t_of(double e) { return e <= 0.0 ? kInf : -0.5 * std::log(e); }

}  // namespace detail

/// p in F: both slices in F_k and all three distortion inequalities hold.
inline bool in_F(const SourceModel& model, const DistortionTriple& targets, const BoundParams& p,
                 double tol = kMembershipTol) {
  for (int k = 1; k <= 2; ++k)
    if (!in_F_k(model.noise(k), p.d(k, 1), p.d(k, 2), p.t(k), tol)) return false;
  for (int l = 1; l <= 2; ++l)
    if (!detail::rel_leq(1.0 / targets.side(l), detail::side_precision(model, p, l), tol))
      return false;
  return detail::rel_leq(1.0 / targets.d0,
                         detail::central_precision(model, detail::e_of(p.t1), detail::e_of(p.t2)),
                         tol);
}

enum class PMembership { P1, P2, None };

inline const char* to_string(PMembership m) {
  switch (m) {
    case PMembership::P1: return "P1";
    case PMembership::P2: return "P2";
    case PMembership::None: return "none";
  }
  return "?";
}

/// Membership in P1 (all three distortion equalities) or P2 (side equalities,
/// central inequality, both t_k on the F-boundary), relative tolerance 1e-9.
inline PMembership in_P(const SourceModel& model, const DistortionTriple& targets,
                        const BoundParams& p, double tol = kMembershipTol) {
  if (!in_F(model, targets, p, tol)) return PMembership::None;
  for (int l = 1; l <= 2; ++l)
    if (!detail::rel_equal(1.0 / targets.side(l), detail::side_precision(model, p, l), tol))
      return PMembership::None;
  const double c = detail::central_precision(model, detail::e_of(p.t1), detail::e_of(p.t2));
  if (detail::rel_equal(1.0 / targets.d0, c, tol)) return PMembership::P1;
  for (int k = 1; k <= 2; ++k) {
    const double n2 = model.noise(k);
    if (std::abs(n2 * detail::e_of(p.t(k)) - std::min(p.d(k, 1), p.d(k, 2))) > tol * n2)
      return PMembership::None;
  }
  return PMembership::P2;
}

/// Moves p in F onto P: raise d_1l (then d_2l if d_1l hits sN1) until the
/// side constraints are tight, then lower t1 and then t2 until the central
/// constraint is tight or t_k reaches its F-boundary.
inline BoundParams project_to_P(const SourceModel& model, const DistortionTriple& targets,
                                const BoundParams& p) {
  model.validate();
  if (!targets.valid_for(model)) throw DomainError("project_to_P: distortion targets not valid");
  if (!in_F(model, targets, p)) throw DomainError("project_to_P: parameter point not in F");
  const double n1 = model.sigma_n1_2, n2 = model.sigma_n2_2;
  BoundParams q = p;
  for (int l = 1; l <= 2; ++l) {
    const double budget = detail::side_budget(model, targets, l);
    const double need1 = n1 * n1 * (budget - q.d(2, l) / (n2 * n2));
    if (need1 <= n1) {
      q.d(1, l) = std::max(q.d(1, l), need1);
    } else {
      q.d(1, l) = n1;
      q.d(2, l) = std::clamp(n2 * n2 * (budget - 1.0 / n1), q.d(2, l), n2);
    }
  }
  for (int k = 1; k <= 2; ++k) {
    const int other = 3 - k;
    const double nk = model.noise(k), no = model.noise(other);
    const double e_other = detail::e_of(q.t(other));
    // e_k that makes the central constraint tight given the other encoder.
    const double e_eq = 1.0 - nk * (1.0 / targets.d0 - 1.0 / model.sigma_s2 - (1.0 - e_other) / no);
    const double e_cap = std::min(q.d(k, 1), q.d(k, 2)) / nk;
    const double e_new = std::max(detail::e_of(q.t(k)), std::min(e_eq, e_cap));
    q.t(k) = detail::t_of(std::min(e_new, 1.0));
  }
  return q;
}

/// Supremum of r_k over sZ in [0, inf).
struct SupResult {
  double sigma_z2 = 0.0;  ///< argmax; +inf when the supremum is the s -> inf limit
  double value = 0.0;
  bool at_infinity() const { return std::isinf(sigma_z2); }
};

/// Stationary points of r_k solve
///   1/(sN + s) + 1/(c + s) = 1/(d1 + s) + 1/(d2 + s),  c = sN e^{-2t},
/// i.e. (P - A) s^2 + 2 (Q - B) s + (A Q - P B) = 0 with A = sN + c,
/// B = sN c, P = d1 + d2, Q = d1 d2. Candidates: s = 0, nonnegative real
/// roots and the s -> inf limit (value t).
inline SupResult sup_sigma_z(double sigma_n2, double d1, double d2, double t) {
  if (!in_F_k(sigma_n2, d1, d2, t)) throw DomainError("sup_sigma_z: (d1, d2, t) outside F_k");
  SupResult best{0.0, r_fn(sigma_n2, d1, d2, t, 0.0)};
  if (std::isinf(t)) return best;
  const double c = sigma_n2 * std::exp(-2.0 * t);
  const double A = sigma_n2 + c, B = sigma_n2 * c, P = d1 + d2, Q = d1 * d2;
  const double qa = P - A, qb = 2.0 * (Q - B), qc = A * Q - P * B;

  std::vector<double> roots;
  const double scale = std::max({std::abs(P), std::abs(A), 1e-300});
  if (std::abs(qa) <= 1e-14 * scale) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(sq, qb));
      if (q != 0.0) {
        roots.push_back(q / qa);
        roots.push_back(qc / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }
  for (double s : roots) {
    if (!(s > 0.0) || !std::isfinite(s)) continue;
    const double v = r_fn(sigma_n2, d1, d2, t, s);
    if (v > best.value) best = {s, v};
  }
  if (t > best.value) best = {kInf, t};
  return best;
}

enum class PBranch { P1, P2 };

inline const char* to_string(PBranch b) { return b == PBranch::P1 ? "P1" : "P2"; }

struct LowerBoundOptions {
  int grid = 64;           ///< points per free dimension
  int refine_passes = 2;   ///< zoomed re-grids around the incumbent
  double shrink = 8.0;     ///< zoom factor per pass
  bool polish = true;      ///< Nelder-Mead polish inside the final window
};

struct LowerBoundResult {
  double value = kInf;
  BoundParams argmin;
  PBranch branch = PBranch::P1;
  std::array<SupResult, 2> sup{};
  double p1_value = kInf;  ///< best value on each branch (+inf when empty)
  double p2_value = kInf;
  std::size_t evaluations = 0;
};

/// sup_{sZ1} r_1 + sup_{sZ2} r_2 + 1/2 log(sS^2 / (D1 D2)) at p.
inline double bound_objective(const SourceModel& model, const DistortionTriple& targets,
                              const BoundParams& p) {
  double v = std::log(model.sigma_s2 * model.sigma_s2 / (targets.d1 * targets.d2)) * 0.5;
  for (int k = 1; k <= 2; ++k) v += sup_sigma_z(model.noise(k), p.d(k, 1), p.d(k, 2), p.t(k)).value;
  return v;
}

namespace detail {

/// Maps normalized coordinates to points of P1 (free d11, d12, e1) or P2
/// (free d11, d12), with the remaining coordinates eliminated through the
/// equality constraints. Returns nullopt outside the feasible region.
class PParametrization {
 public:
  PParametrization(const SourceModel& m, const DistortionTriple& tg) : m_(m), tg_(tg) {
    const double n1 = m.sigma_n1_2, n2 = m.sigma_n2_2;
    for (int l = 1; l <= 2; ++l) {
      budget_[l - 1] = side_budget(m, tg, l);
      // d_2l = n2^2 (K_l - d_1l / n1^2) in [0, n2]  =>  d_1l in [lo, hi].
      lo_[l - 1] = std::max(0.0, n1 * n1 * (budget_[l - 1] - 1.0 / n2));
      hi_[l - 1] = std::min(n1, n1 * n1 * budget_[l - 1]);
    }
    ratio_ = n2 / n1;
    e_base_ = 1.0 - n2 * (1.0 / tg.d0 - 1.0 / m.sigma_s2 - 1.0 / n1);
  }

  bool box_empty() const { return lo_[0] > hi_[0] || lo_[1] > hi_[1]; }

  std::optional<BoundParams> p1(double u0, double u1, double u2) const {
    BoundParams p;
    if (!sides(u0, u1, p)) return std::nullopt;
    const double n1 = m_.sigma_n1_2, n2 = m_.sigma_n2_2;
    // e2 = e_base - ratio * e1 must lie in [0, min(1, min(d21, d22)/n2)].
    const double e2_cap = std::min(1.0, std::min(p.d21, p.d22) / n2);
    const double lo = std::max(0.0, (e_base_ - e2_cap) / ratio_);
    const double hi = std::min({1.0, std::min(p.d11, p.d12) / n1, e_base_ / ratio_});
    if (!(lo <= hi)) return std::nullopt;
    const double e1 = lo + u2 * (hi - lo);
    const double e2 = std::clamp(e_base_ - ratio_ * e1, 0.0, e2_cap);
    if (e1 <= 0.0 || e2 <= 0.0) return std::nullopt;
    p.t1 = t_of(e1);
    p.t2 = t_of(e2);
    return p;
  }

  std::optional<BoundParams> p2(double u0, double u1) const {
    BoundParams p;
    if (!sides(u0, u1, p)) return std::nullopt;
    const double e1 = std::min(p.d11, p.d12) / m_.sigma_n1_2;
    const double e2 = std::min(p.d21, p.d22) / m_.sigma_n2_2;
    if (e1 <= 0.0 || e2 <= 0.0) return std::nullopt;
    if (1.0 / tg_.d0 > central_precision(m_, e1, e2)) return std::nullopt;
    p.t1 = t_of(e1);
    p.t2 = t_of(e2);
    return p;
  }

 private:
  bool sides(double u0, double u1, BoundParams& p) const {
    if (box_empty()) return false;
    const double n1 = m_.sigma_n1_2, n2 = m_.sigma_n2_2;
    const std::array<double, 2> u{u0, u1};
    for (int l = 1; l <= 2; ++l) {
      const auto i = static_cast<std::size_t>(l - 1);
      const double d1 = lo_[i] + u[i] * (hi_[i] - lo_[i]);
      p.d(1, l) = d1;
      p.d(2, l) = std::clamp(n2 * n2 * (budget_[i] - d1 / (n1 * n1)), 0.0, n2);
      if (p.d(1, l) <= 0.0 || p.d(2, l) <= 0.0) return false;
    }
    return true;
  }

  SourceModel m_;
  DistortionTriple tg_;
  std::array<double, 2> budget_{}, lo_{}, hi_{};
  double ratio_ = 1.0;
  double e_base_ = 0.0;
};

/// Grid search over [0,1]^N with zoomed re-grids and a final polish. Points
/// are visited in lexicographic order and only strict improvements replace
/// the incumbent, so ties resolve to the lexicographically smallest point.
template <std::size_t N, class Eval>
std::pair<double, std::array<double, N>> grid_minimize(Eval&& eval, const LowerBoundOptions& opts,
                                                       std::size_t& evals) {
  const int g = std::max(opts.grid, 2);
  std::array<double, N> center{}, half{};
  center.fill(0.5);
  half.fill(0.5);
  double best = kInf;
  std::array<double, N> best_u{};
  best_u.fill(0.5);

  for (int pass = 0; pass <= opts.refine_passes; ++pass) {
    std::array<double, N> lo{}, hi{};
    for (std::size_t i = 0; i < N; ++i) {
      lo[i] = std::max(0.0, center[i] - half[i]);
      hi[i] = std::min(1.0, center[i] + half[i]);
    }
    std::array<int, N> idx{};
    while (true) {
      std::array<double, N> u{};
      for (std::size_t i = 0; i < N; ++i)
        u[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[i]) / (g - 1);
      ++evals;
      const double v = eval(u);
      if (v < best) {
        best = v;
        best_u = u;
      }
      std::size_t i = N;
      while (i > 0) {
        --i;
        if (++idx[i] < g) break;
        idx[i] = 0;
        if (i == 0) goto done;
      }
    }
  done:
    if (!std::isfinite(best)) break;
    center = best_u;
    for (double& h : half) h /= opts.shrink;
  }

  if (opts.polish && std::isfinite(best)) {
    auto f = [&](const std::vector<double>& x) {
      std::array<double, N> u{};
      for (std::size_t i = 0; i < N; ++i) {
        if (x[i] < 0.0 || x[i] > 1.0) return kInf;
        u[i] = x[i];
      }
      return eval(u);
    };
    std::vector<double> x0(best_u.begin(), best_u.end());
    std::vector<double> step(N);
    for (std::size_t i = 0; i < N; ++i) step[i] = std::max(half[i], 1e-6);
    NelderMeadOptions nm;
    nm.ftol = 1e-14;
    nm.xtol = 1e-12;
    nm.max_evals = 3000;
    const auto r = nelder_mead(f, x0, step, nm);
    evals += r.evals;
    if (r.value < best) {
      best = r.value;
      for (std::size_t i = 0; i < N; ++i) best_u[i] = r.x[i];
    }
  }
  return {best, best_u};
}

}  // namespace detail

/// inf over P of [sup r_1 + sup r_2] + 1/2 log(sS^2 / (D1 D2)).
inline LowerBoundResult lower_bound(const SourceModel& model, const DistortionTriple& targets,
                                    const LowerBoundOptions& opts = {}) {
  model.validate();
  if (!targets.valid_for(model))
    throw DomainError("lower bound needs 0 < D0 < min{D1,D2} and max{D1,D2} < sigma_S^2");
  const detail::PParametrization par(model, targets);
  LowerBoundResult out;

  auto value_at = [&](const std::optional<BoundParams>& p) {
    return p ? bound_objective(model, targets, *p) : kInf;
  };
  auto [v1, u1] = detail::grid_minimize<3>(
      [&](const std::array<double, 3>& u) { return value_at(par.p1(u[0], u[1], u[2])); }, opts,
      out.evaluations);
  auto [v2, u2] = detail::grid_minimize<2>(
      [&](const std::array<double, 2>& u) { return value_at(par.p2(u[0], u[1])); }, opts,
      out.evaluations);
  out.p1_value = v1;
  out.p2_value = v2;
  if (!std::isfinite(v1) && !std::isfinite(v2))
    throw InfeasibleError("infeasible: no parameter point in P meets the distortion targets");

  if (v1 <= v2) {
    out.branch = PBranch::P1;
    out.argmin = *par.p1(u1[0], u1[1], u1[2]);
    out.value = v1;
  } else {
    out.branch = PBranch::P2;
    out.argmin = *par.p2(u2[0], u2[1]);
    out.value = v2;
  }
  for (int k = 1; k <= 2; ++k)
    out.sup[static_cast<std::size_t>(k - 1)] =
        sup_sigma_z(model.noise(k), out.argmin.d(k, 1), out.argmin.d(k, 2), out.argmin.t(k));
  return out;
}

}  // namespace vceo
