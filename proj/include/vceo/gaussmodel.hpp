#pragma once

// Dense Gaussian covariance algebra over the labeled variables of the
// vacationing-CEO model: joint covariance assembly, conditioning and
// log-det mutual information. Matrices are at most 9x9.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vceo/errors.hpp"
#include "vceo/types.hpp"

namespace vceo {

enum class Var : std::uint8_t { S, X1, X2, U11, U12, U21, U22, Y1, Y2 };

using VarSet = std::vector<Var>;

constexpr std::string_view name(Var v) {
  constexpr std::array<std::string_view, 9> names{"S",   "X1",  "X2",  "U11", "U12",
                                                   "U21", "U22", "Y1",  "Y2"};
  return names[static_cast<std::size_t>(v)];
}

/// Observation of encoder k, description l of encoder k, side-channel of encoder k.
constexpr Var x_var(int k) { return k == 1 ? Var::X1 : Var::X2; }
constexpr Var u_var(int k, int l) {
  if (k == 1) return l == 1 ? Var::U11 : Var::U12;
  return l == 1 ? Var::U21 : Var::U22;
}
constexpr Var y_var(int k) { return k == 1 ? Var::Y1 : Var::Y2; }

namespace detail {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kPinvCutoff = 1e-12;
inline constexpr double kSingularTol = 1e-13;

inline void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace detail

/// Symmetric PSD covariance matrix indexed by unique variable labels.
class LabeledCov {
 public:
  LabeledCov(std::vector<Var> labels, Eigen::MatrixXd matrix)
      : labels_(std::move(labels)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(labels_.size());
    if (matrix_.rows() != n || matrix_.cols() != n)
      throw DomainError("covariance dimension does not match label count");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t j = i + 1; j < labels_.size(); ++j)
        if (labels_[i] == labels_[j])
          throw DomainError("duplicate label " + std::string(name(labels_[i])));
    if (!matrix_.allFinite()) throw DomainError("covariance has non-finite entries");
    const double scale = std::max(matrix_.cwiseAbs().maxCoeff(), 1e-300);
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > detail::kSymmetryTol * scale)
      throw DomainError("covariance is not symmetric");
    detail::symmetrize(matrix_);
    if (n > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_, Eigen::EigenvaluesOnly);
      const auto& ev = es.eigenvalues();
      if (ev.minCoeff() < -detail::kPsdTol * std::max(ev.maxCoeff(), 0.0))
        throw DomainError("covariance is not positive semidefinite");
    }
  }

  const std::vector<Var>& labels() const noexcept { return labels_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return labels_.size(); }

  bool contains(Var v) const { return std::find(labels_.begin(), labels_.end(), v) != labels_.end(); }

  Eigen::Index index(Var v) const {
    auto it = std::find(labels_.begin(), labels_.end(), v);
    if (it == labels_.end()) throw DomainError("unknown label " + std::string(name(v)));
    return static_cast<Eigen::Index>(it - labels_.begin());
  }

  double cov(Var a, Var b) const { return matrix_(index(a), index(b)); }

  Eigen::MatrixXd block(const VarSet& rows, const VarSet& cols) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            matrix_(index(rows[i]), index(cols[j]));
    return out;
  }

 private:
  std::vector<Var> labels_;
  Eigen::MatrixXd matrix_;
};

/// Joint covariance of (S, X1, X2, U11, U12, U21, U22), plus (Y1, Y2) when
/// side-noise variances are supplied. S, N1, N2, W and Z are mutually
/// independent; Cov(W_k1, W_k2) = -a_k; W of different encoders independent.
inline LabeledCov build_joint_cov(const SourceModel& model, const SchemeParams& params,
                                  std::optional<std::pair<double, double>> noise_z = std::nullopt) {
  model.validate();
  params.validate();
  if (!params.all_finite())
    throw DomainError("joint covariance needs finite auxiliary variances");
  if (noise_z) {
    auto [z1, z2] = *noise_z;
    if (!(std::isfinite(z1) && std::isfinite(z2) && z1 >= 0.0 && z2 >= 0.0))
      throw DomainError("side-noise variances must be finite and >= 0");
  }

  // Independent base: S, N1, N2, W11, W12, W21, W22, Z1, Z2.
  constexpr int kBase = 9;
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(kBase, kBase);
  base(0, 0) = model.sigma_s2;
  base(1, 1) = model.sigma_n1_2;
  base(2, 2) = model.sigma_n2_2;
  base(3, 3) = params.w11;
  base(4, 4) = params.w12;
  base(3, 4) = base(4, 3) = -params.a1;
  base(5, 5) = params.w21;
  base(6, 6) = params.w22;
  base(5, 6) = base(6, 5) = -params.a2;
  if (noise_z) {
    base(7, 7) = noise_z->first;
    base(8, 8) = noise_z->second;
  }

  std::vector<Var> labels{Var::S, Var::X1, Var::X2, Var::U11, Var::U12, Var::U21, Var::U22};
  if (noise_z) {
    labels.push_back(Var::Y1);
    labels.push_back(Var::Y2);
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd load = Eigen::MatrixXd::Zero(n, kBase);
  for (Eigen::Index i = 0; i < n; ++i) {
    load(i, 0) = 1.0;  // every label carries S
    switch (labels[static_cast<std::size_t>(i)]) {
      case Var::S: break;
      case Var::X1: load(i, 1) = 1; break;
      case Var::X2: load(i, 2) = 1; break;
      case Var::U11: load(i, 1) = 1; load(i, 3) = 1; break;
      case Var::U12: load(i, 1) = 1; load(i, 4) = 1; break;
      case Var::U21: load(i, 2) = 1; load(i, 5) = 1; break;
      case Var::U22: load(i, 2) = 1; load(i, 6) = 1; break;
      case Var::Y1: load(i, 1) = 1; load(i, 7) = 1; break;
      case Var::Y2: load(i, 2) = 1; load(i, 8) = 1; break;
    }
  }
  Eigen::MatrixXd joint = load * base * load.transpose();
  detail::symmetrize(joint);
  return LabeledCov(std::move(labels), std::move(joint));
}

namespace detail {

inline void require_disjoint(const VarSet& a, const VarSet& b) {
  for (Var x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw DomainError("label sets must be disjoint (" + std::string(name(x)) + ")");
}

/// 1/sqrt of the diagonal, with 1 for zero-variance entries; used to
/// equilibrate covariance blocks so singularity tests are scale-free.
inline Eigen::VectorXd inv_sqrt_diag(const Eigen::VectorXd& diag) {
  Eigen::VectorXd out(diag.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    out(i) = diag(i) > 0.0 ? 1.0 / std::sqrt(diag(i)) : 1.0;
  return out;
}

/// Solves sigma_bb * X = rhs, falling back to an eigenvalue pseudo-inverse
/// when sigma_bb is (numerically) singular after equilibration.
inline Eigen::MatrixXd solve_psd(const Eigen::MatrixXd& sigma_bb, const Eigen::MatrixXd& rhs) {
  const Eigen::VectorXd n = inv_sqrt_diag(sigma_bb.diagonal());
  const Eigen::MatrixXd c = n.asDiagonal() * sigma_bb * n.asDiagonal();
  const Eigen::MatrixXd r = n.asDiagonal() * rhs;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
  if (ldlt.info() == Eigen::Success) {
    const auto d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (d.minCoeff() > kPinvCutoff * dmax) return n.asDiagonal() * ldlt.solve(r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const auto& ev = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const double emax = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < -kPsdTol * emax)
    throw DegenerateConditioning("conditioning block is not positive semidefinite");
  Eigen::MatrixXd proj = vecs.transpose() * r;
  const double rhs_scale = std::max(r.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > kPinvCutoff * emax) {
      proj.row(i) /= ev(i);
    } else {
      // Cross-covariance must vanish along null directions of the block.
      if (proj.row(i).cwiseAbs().maxCoeff() > 1e-8 * rhs_scale)
        throw DegenerateConditioning("cross-covariance inconsistent with singular conditioning block");
      proj.row(i).setZero();
    }
  }
  return n.asDiagonal() * (vecs * proj);
}

/// log det of a PSD matrix; throws InfiniteInformation when it is singular
/// after scaling each variable by `ref` (reference variances of the same
/// variables, typically their unconditional variances).
inline double logdet_psd(const Eigen::MatrixXd& m, const Eigen::VectorXd& ref, const char* what) {
  if (m.rows() == 0) return 0.0;
  const Eigen::VectorXd n = inv_sqrt_diag(ref);
  const Eigen::MatrixXd c = n.asDiagonal() * m * n.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
  const auto d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= kSingularTol)
    throw InfiniteInformation(std::string("singular covariance in ") + what);
  return d.array().log().sum() - 2.0 * n.array().log().sum();
}

}  // namespace detail

/// Cov(A | B) = S_AA - S_AB S_BB^+ S_BA. A and B may overlap.
inline Eigen::MatrixXd conditional_cov(const LabeledCov& cov, const VarSet& targets,
                                       const VarSet& given) {
  Eigen::MatrixXd saa = cov.block(targets, targets);
  if (given.empty() || targets.empty()) return saa;
  const Eigen::MatrixXd sab = cov.block(targets, given);
  const Eigen::MatrixXd sbb = cov.block(given, given);
  Eigen::MatrixXd out = saa - sab * detail::solve_psd(sbb, sab.transpose());
  detail::symmetrize(out);
  // Clip rounding below zero on the diagonal (e.g. self-conditioning).
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    if (out(i, i) < 0.0 && out(i, i) > -detail::kPsdTol * saa(i, i)) out(i, i) = 0.0;
  return out;
}

/// Scalar convenience wrapper: Var(target | given).
inline double conditional_var(const LabeledCov& cov, Var target, const VarSet& given) {
  return conditional_cov(cov, {target}, given)(0, 0);
}

/// I(A;B) = 1/2 log det S_A - 1/2 log det S_{A|B}, in nats.
inline double gaussian_mi(const LabeledCov& cov, const VarSet& a, const VarSet& b) {
  detail::require_disjoint(a, b);
  if (a.empty() || b.empty()) return 0.0;
  const Eigen::MatrixXd saa = cov.block(a, a);
  const Eigen::VectorXd ref = saa.diagonal();
  const double ld_a = [&] {
    try {
      return detail::logdet_psd(saa, ref, "target block");
    } catch (const InfiniteInformation&) {
      throw DegenerateConditioning("target label set is linearly dependent");
    }
  }();
  const double ld_ab = detail::logdet_psd(conditional_cov(cov, a, b), ref, "conditional block");
  return std::max(0.0, 0.5 * (ld_a - ld_ab));
}

/// I(A;B|C) = 1/2 [log det S_{A|C} + log det S_{B|C} - log det S_{AB|C}].
inline double conditional_mi(const LabeledCov& cov, const VarSet& a, const VarSet& b,
                             const VarSet& c) {
  detail::require_disjoint(a, b);
  detail::require_disjoint(a, c);
  detail::require_disjoint(b, c);
  if (c.empty()) return gaussian_mi(cov, a, b);
  if (a.empty() || b.empty()) return 0.0;
  VarSet ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const Eigen::VectorXd ref = cov.block(ab, ab).diagonal();
  const auto na = static_cast<Eigen::Index>(a.size()), nb = static_cast<Eigen::Index>(b.size());
  const double la =
      detail::logdet_psd(conditional_cov(cov, a, c), ref.head(na), "I(A;B|C), A|C");
  const double lb =
      detail::logdet_psd(conditional_cov(cov, b, c), ref.tail(nb), "I(A;B|C), B|C");
  const double lab = detail::logdet_psd(conditional_cov(cov, ab, c), ref, "I(A;B|C), AB|C");
  const double v = 0.5 * (la + lb - lab);
  if (v < -1e-8 * (1.0 + std::abs(la) + std::abs(lb)))
    throw DegenerateConditioning("negative conditional mutual information");
  return std::max(0.0, v);
}

}  // namespace vceo
