#pragma once

// Multistart derivative-free minimization of the Gaussian scheme's sum rate
// subject to the three distortion constraints.
//
// Search coordinates: log(w_kl / sN_k) in [log 1e-8, log 1e8] and
// rho_k in [0, 1) with a_k = rho_k * min(sqrt(w_k1 w_k2), sN_k), so the K_w
// PSD constraint and the a_k range are box constraints. Distortion
// constraints are enforced by a restoration map that shrinks the auxiliary
// variances onto the feasible set before each objective evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "vceo/detail/nelder_mead.hpp"
#include "vceo/detail/random.hpp"
#include "vceo/errors.hpp"
#include "vceo/scheme.hpp"
#include "vceo/types.hpp"

namespace vceo {

/// Ratio of the largest auxiliary variance to sN_k; stands in for an absent description.
inline constexpr double kAbsentDescriptionRatio = 1e8;

struct OptimizeOptions {
  int starts = 16;
  double tol = 1e-7;  ///< relative objective tolerance of each local search
  std::uint64_t seed = 1;
  std::size_t max_evals_per_start = 6000;
};

struct OptimizeResult {
  SchemeParams params;
  RateBreakdown rates;
  std::array<double, 3> distortions{};  ///< delta_1, delta_2, delta_0
  int best_start = 0;
  std::size_t evaluations = 0;
};

namespace detail {

inline constexpr double kMinLogRatio = -18.420680743952367;  // log 1e-8
inline constexpr double kMaxLogRatio = 18.420680743952367;   // log 1e8
inline constexpr double kMaxRho = 1.0 - 1e-9;

inline void check_feasible(const SourceModel& model, const DistortionTriple& targets) {
  model.validate();
  if (!targets.positive()) throw DomainError("distortion targets must be finite and > 0");
  const double floor = model.remote_mmse();
  auto fail = [&](const char* which, double d) {
    std::ostringstream os;
    os.precision(17);
    os << "infeasible: " << which << " = " << d << " is not above Var(S|X1,X2) = " << floor;
    throw InfeasibleError(os.str());
  };
  if (targets.d1 <= floor) fail("D1", targets.d1);
  if (targets.d2 <= floor) fail("D2", targets.d2);
  if (targets.d0 <= floor) fail("D0", targets.d0);
}

struct Decoded {
  std::array<double, 4> w{};  // w11, w12, w21, w22
  std::array<double, 2> rho{};
};

inline Decoded decode(const SourceModel& model, const std::vector<double>& x) {
  Decoded d;
  for (int k = 1; k <= 2; ++k)
    for (int l = 1; l <= 2; ++l) {
      const auto i = static_cast<std::size_t>(2 * (k - 1) + (l - 1));
      d.w[i] = model.noise(k) * std::exp(std::clamp(x[i], kMinLogRatio, kMaxLogRatio));
    }
  d.rho[0] = std::clamp(x[4], 0.0, kMaxRho);
  d.rho[1] = std::clamp(x[5], 0.0, kMaxRho);
  return d;
}

inline SchemeParams assemble(const SourceModel& model, const std::array<double, 4>& w,
                             const std::array<double, 2>& rho) {
  SchemeParams p{w[0], w[1], w[2], w[3], 0.0, 0.0};
  for (int k = 1; k <= 2; ++k) {
    const double cap = std::min(std::sqrt(p.w(k, 1) * p.w(k, 2)), model.noise(k));
    p.a(k) = rho[static_cast<std::size_t>(k - 1)] * cap;
  }
  return p;
}

/// Largest lambda in [0, 1] (to bisection precision) with feasible(lambda),
/// given feasible(0) holds.
template <class Pred>
double largest_feasible_scale(Pred&& feasible) {
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Shrinks auxiliary variances until every distortion constraint holds.
inline SchemeParams restore(const SourceModel& model, const DistortionTriple& targets,
                            Decoded d) {
  for (int l = 1; l <= 2; ++l) {
    const auto i1 = static_cast<std::size_t>(l - 1), i2 = static_cast<std::size_t>(2 + l - 1);
    const double w1 = d.w[i1], w2 = d.w[i2];
    const double lam = largest_feasible_scale([&](double s) {
      if (s == 0.0) return true;
      auto w = d.w;
      w[i1] = s * w1;
      w[i2] = s * w2;
      return receiver_distortion(model, assemble(model, w, d.rho), l) <= targets.side(l);
    });
    d.w[i1] = lam * w1;
    d.w[i2] = lam * w2;
  }
  const auto w0 = d.w;
  const double lam = largest_feasible_scale([&](double s) {
    if (s == 0.0) return true;
    auto w = w0;
    for (double& v : w) v *= s;
    return central_distortion(model, assemble(model, w, d.rho)) <= targets.d0;
  });
  for (double& v : d.w) v *= lam;
  return assemble(model, d.w, d.rho);
}

inline double objective(const SourceModel& model, const SchemeParams& p) {
  try {
    return sum_rate(model, p).sum_rate;
  } catch (const InfiniteInformation&) {
    return kInf;
  } catch (const DegenerateConditioning&) {
    return kInf;
  }
}

}  // namespace detail

/// Minimizes I(X1,X2;U) + I(U11,U21;U12,U22) over valid scheme parameters
/// meeting receiver_distortion <= D_l and central_distortion <= D0.
/// Deterministic for a fixed seed.
inline OptimizeResult optimize_sum_rate(const SourceModel& model, const DistortionTriple& targets,
                                        const OptimizeOptions& opts = {}) {
  detail::check_feasible(model, targets);
  if (opts.starts < 1) throw DomainError("need at least one start");

  auto f = [&](const std::vector<double>& x) {
    return detail::objective(model, detail::restore(model, targets, detail::decode(model, x)));
  };

  detail::NelderMeadOptions nm;
  nm.ftol = opts.tol;
  nm.xtol = 1e-7;
  nm.max_evals = opts.max_evals_per_start;
  nm.restarts = 4;
  const std::vector<double> step{1.0, 1.0, 1.0, 1.0, 0.2, 0.2};

  detail::SplitMix rng(opts.seed);
  OptimizeResult out;
  double best = kInf;
  std::vector<double> best_x;
  for (int s = 0; s < opts.starts; ++s) {
    std::vector<double> x0(6);
    if (s == 0) {
      x0 = {0.0, 0.0, 0.0, 0.0, 0.3, 0.3};
    } else {
      for (int i = 0; i < 4; ++i) x0[static_cast<std::size_t>(i)] = rng.uniform(-5.0, 5.0);
      x0[4] = rng.uniform(0.0, 0.95);
      x0[5] = rng.uniform(0.0, 0.95);
    }
    const auto r = detail::nelder_mead(f, x0, step, nm);
    out.evaluations += r.evals;
    if (r.value < best) {
      best = r.value;
      best_x = r.x;
      out.best_start = s;
    }
  }
  if (!std::isfinite(best)) throw InfeasibleError("no finite-rate scheme found for the targets");

  // Final polish from the incumbent with a small simplex.
  nm.restarts = 6;
  const auto r = detail::nelder_mead(f, best_x, {0.05, 0.05, 0.05, 0.05, 0.02, 0.02}, nm);
  out.evaluations += r.evals;
  if (r.value < best) best_x = r.x;

  out.params = detail::restore(model, targets, detail::decode(model, best_x));
  out.rates = sum_rate(model, out.params);
  out.distortions = {receiver_distortion(model, out.params, 1),
                     receiver_distortion(model, out.params, 2),
                     central_distortion(model, out.params)};
  return out;
}

}  // namespace vceo
