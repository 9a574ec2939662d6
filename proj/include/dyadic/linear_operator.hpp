#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include <Eigen/Core>

#include "dyadic/function.hpp"
#include "dyadic/shift.hpp"

namespace dyadic {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// A linear map on the samples of one grid, with optional adjoint.
struct LinearOperatorHandle {
  Grid grid;
  VectorMap apply;
  VectorMap adjoint;  // empty when unknown
  std::string kind;
  std::map<std::string, double> params;

  DyadicFunction operator()(const DyadicFunction& f) const;
};

LinearOperatorHandle shift_handle(const ShiftOperator& s);
LinearOperatorHandle identity_handle(const Grid& grid);
LinearOperatorHandle zero_handle(const Grid& grid);

/// b (T f) - T(b f).
DyadicFunction multiplication_commutator(const DyadicFunction& b, const LinearOperatorHandle& t,
                                         const DyadicFunction& f);

/// Dense matrix of T in the cell basis (column c is T applied to e_c).
Eigen::MatrixXd assemble(const LinearOperatorHandle& t);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value by power iteration on T^T T. Stops once the
/// Rayleigh residual is below tol (relative); the start vector comes from
/// `seed`. Without an adjoint the matrix is assembled and transposed.
NormEstimate operator_norm(const LinearOperatorHandle& t, int max_iters = 20000, double tol = 1e-6,
                           std::uint64_t seed = 1);

}  // namespace dyadic
