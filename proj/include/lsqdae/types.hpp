#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lsqdae {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid argument or precondition violation (caller bug).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluation left the domain of the problem data (non-finite values, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown inside a solver (non-finite matrices, failed
/// factorization, rank collapse where full rank is required).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace lsqdae
