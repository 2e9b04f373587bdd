#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vceo {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Distortion targets that no scheme (or no converse parameter point) can meet.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conditioning on a covariance block that is not PSD or is inconsistent
/// with the cross-covariances.
class DegenerateConditioning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mutual information that diverges (deterministic dependence).
class InfiniteInformation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collinear regressors in the empirical MMSE fit.
class DegenerateRegression : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed instance file. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace vceo
