#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace vceo::detail {

struct NelderMeadOptions {
  double ftol = 1e-10;       ///< stop when the simplex value spread falls below this
  double xtol = 1e-10;       ///< ... and the simplex diameter falls below this
  std::size_t max_evals = 4000;
  int restarts = 3;          ///< fresh simplices around the incumbent after convergence
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evals = 0;
};

/// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
/// with restarts. Non-finite objective values are treated as +inf.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const std::vector<double>& step,
                             const NelderMeadOptions& opts = {}) {
  const std::size_t n = x0.size();
  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  NelderMeadResult best{x0, eval(x0), 0};
  for (int round = 0; round <= opts.restarts && evals < opts.max_evals; ++round) {
    std::vector<std::vector<double>> pts(n + 1, best.x);
    std::vector<double> vals(n + 1, best.value);
    const double scale = std::pow(0.5, round);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += step[i] * scale;
      vals[i + 1] = eval(pts[i + 1]);
    }
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    while (evals < opts.max_evals) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t lo = order.front(), hi = order.back(), nh = order[n - 1];

      double diam = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          diam = std::max(diam, std::abs(pts[i][j] - pts[lo][j]));
      const double spread = vals[hi] - vals[lo];
      if ((std::isfinite(spread) && spread <= opts.ftol * (1.0 + std::abs(vals[lo])) &&
           diam <= opts.xtol) ||
          diam <= 1e-15)
        break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i)
        if (i != hi)
          for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

      for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + (centroid[j] - pts[hi][j]);
      const double fr = eval(trial);
      if (fr < vals[lo]) {
        for (std::size_t j = 0; j < n; ++j) trial2[j] = centroid[j] + 2.0 * (centroid[j] - pts[hi][j]);
        const double fe = eval(trial2);
        if (fe < fr) {
          pts[hi] = trial2;
          vals[hi] = fe;
        } else {
          pts[hi] = trial;
          vals[hi] = fr;
        }
        continue;
      }
      if (fr < vals[nh]) {
        pts[hi] = trial;
        vals[hi] = fr;
        continue;
      }
      const bool outside = fr < vals[hi];
      for (std::size_t j = 0; j < n; ++j)
        trial2[j] = outside ? centroid[j] + 0.5 * (trial[j] - centroid[j])
                            : centroid[j] + 0.5 * (pts[hi][j] - centroid[j]);
      const double fc = eval(trial2);
      if (fc < std::min(fr, vals[hi])) {
        pts[hi] = trial2;
        vals[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == lo) continue;
        for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
        vals[i] = eval(pts[i]);
      }
    }

    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    const bool improved = *it < best.value - opts.ftol * (1.0 + std::abs(best.value));
    if (*it < best.value) {
      best.x = pts[idx];
      best.value = *it;
    }
    if (round > 0 && !improved) break;
  }
  best.evals = evals;
  return best;
}

}  // namespace vceo::detail
