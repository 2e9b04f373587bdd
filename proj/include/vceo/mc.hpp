#pragma once

// Monte-Carlo oracle: draw from the scheme's joint Gaussian law and fit
// least-squares linear predictors, to check the closed-form distortions
// against data.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vceo/detail/random.hpp"
#include "vceo/errors.hpp"
#include "vceo/gaussmodel.hpp"
#include "vceo/scheme.hpp"

namespace vceo {

using SampleRows = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n draws (rows) over the labels of the 7-variable joint law.
struct SampleMatrix {
  std::vector<Var> labels;
  SampleRows data;

  Eigen::Index column(Var v) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == v) return static_cast<Eigen::Index>(i);
    throw DomainError("sample matrix has no column " + std::string(name(v)));
  }
};

namespace detail {

/// Lower factor L with L L^T = cov; eigen square root when cov is singular.
inline Eigen::MatrixXd sampling_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd l = llt.matrixL();
    const double dmax = l.diagonal().cwiseAbs().maxCoeff();
    if (l.diagonal().minCoeff() > 1e-7 * dmax) return l;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace detail

/// Rows [first_row, first_row + n) of the seeded sample stream. Row i uses
/// standard normals drawn from counters 4i .. 4i+3, so any split of the row
/// range into shards reproduces the same rows.
inline SampleMatrix sample_joint(const SourceModel& model, const SchemeParams& params,
                                 std::size_t n, std::uint64_t seed, std::uint64_t first_row = 0) {
  if (n < 1) throw DomainError("sample_joint: need n >= 1");
  const LabeledCov cov = build_joint_cov(model, params);
  const Eigen::MatrixXd factor = detail::sampling_factor(cov.matrix());
  const auto dim = static_cast<Eigen::Index>(cov.size());
  SampleMatrix out{cov.labels(), SampleRows(static_cast<Eigen::Index>(n), dim)};
  Eigen::VectorXd z(8);
  for (std::size_t r = 0; r < n; ++r) {
    const std::uint64_t row = first_row + r;
    for (int p = 0; p < 4; ++p) detail::normal_pair(seed, 4 * row + static_cast<std::uint64_t>(p), z(2 * p), z(2 * p + 1));
    out.data.row(static_cast<Eigen::Index>(r)) = (factor * z.head(dim)).transpose();
  }
  return out;
}

struct MmseEstimate {
  double distortion = 0.0;  ///< mean squared residual of the fitted linear predictor
  double stderr_ = 0.0;     ///< sd of the squared residuals / sqrt(n)
};

/// Least-squares linear (zero-intercept) predictor of `target` from `given`.
inline MmseEstimate empirical_mmse(const SampleMatrix& s, Var target, const VarSet& given) {
  const Eigen::Index n = s.data.rows();
  if (n < 2) throw DomainError("empirical_mmse: need at least 2 samples");
  const Eigen::VectorXd y = s.data.col(s.column(target));
  Eigen::VectorXd resid = y;
  if (!given.empty()) {
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(given.size()));
    for (std::size_t j = 0; j < given.size(); ++j)
      x.col(static_cast<Eigen::Index>(j)) = s.data.col(s.column(given[j]));
    const Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
      throw DegenerateRegression("empirical_mmse: collinear conditioning variables");
    const Eigen::VectorXd beta = gram.ldlt().solve(x.transpose() * y);
    resid = y - x * beta;
  }
  const Eigen::ArrayXd sq = resid.array().square();
  const double mean = sq.mean();
  const double var = (sq - mean).square().sum() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

/// One analytic-versus-empirical comparison.
struct McQuantity {
  std::string name;
  double analytic = 0.0;
  double empirical = 0.0;
  double stderr_ = 0.0;

  double z_score() const {
    if (stderr_ == 0.0) return analytic == empirical ? 0.0 : kInf;
    return std::abs(analytic - empirical) / stderr_;
  }
  bool pass(double k = 5.0) const {
    return std::abs(analytic - empirical) <= k * stderr_ + 1e-12 * std::abs(analytic);
  }
};

struct McReport {
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<McQuantity> rows;

  bool all_pass(double k = 5.0) const {
    for (const auto& q : rows)
      if (!q.pass(k)) return false;
    return true;
  }
};

/// Checks delta_1, delta_2, delta_0 and d'_kl against empirical linear MMSE.
inline McReport mc_validate(const SourceModel& model, const SchemeParams& params, std::size_t n,
                            std::uint64_t seed) {
  const SampleMatrix s = sample_joint(model, params, n, seed);
  const MarginalParams mp = marginal_params(model, params);
  McReport rep{n, seed, {}};
  auto add = [&](std::string label, double analytic, Var target, const VarSet& given) {
    const MmseEstimate e = empirical_mmse(s, target, given);
    rep.rows.push_back({std::move(label), analytic, e.distortion, e.stderr_});
  };
  add("delta1", receiver_distortion(model, params, 1), Var::S, {Var::U11, Var::U21});
  add("delta2", receiver_distortion(model, params, 2), Var::S, {Var::U12, Var::U22});
  add("delta0", central_distortion(model, params), Var::S,
      {Var::U11, Var::U12, Var::U21, Var::U22});
  for (int k = 1; k <= 2; ++k)
    for (int l = 1; l <= 2; ++l)
      add("d'" + std::to_string(k) + std::to_string(l), mp.dk(k, l), x_var(k),
          {u_var(k, l), Var::S});
  return rep;
}

}  // namespace vceo
