#include "dyadic/linear_operator.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "dyadic/random.hpp"

namespace dyadic {

DyadicFunction LinearOperatorHandle::operator()(const DyadicFunction& f) const {
  require_same_grid(grid, f.grid(), kind.c_str());
  return {grid, apply(f.samples())};
}

LinearOperatorHandle shift_handle(const ShiftOperator& s) {
  auto op = std::make_shared<const ShiftOperator>(s);
  auto adj = std::make_shared<const ShiftOperator>(adjoint(s));
  return {s.grid(),
          [op](const Eigen::VectorXd& v) { return apply_shift(*op, v); },
          [adj](const Eigen::VectorXd& v) { return apply_shift(*adj, v); },
          s.kind() == ShiftKind::cancellative ? "shift" : "shift00",
          {{"i", s.i()}, {"j", s.j()}}};
}

LinearOperatorHandle identity_handle(const Grid& grid) {
  auto id = [](const Eigen::VectorXd& v) { return v; };
  return {grid, id, id, "identity", {}};
}

LinearOperatorHandle zero_handle(const Grid& grid) {
  auto zero = [](const Eigen::VectorXd& v) { return Eigen::VectorXd::Zero(v.size()).eval(); };
  return {grid, zero, zero, "zero", {}};
}

DyadicFunction multiplication_commutator(const DyadicFunction& b, const LinearOperatorHandle& t,
                                         const DyadicFunction& f) {
  require_same_grid(b.grid(), f.grid(), "multiplication_commutator");
  require_same_grid(t.grid, f.grid(), "multiplication_commutator");
  return pointwise_multiply(b, t(f)) - t(pointwise_multiply(b, f));
}

Eigen::MatrixXd assemble(const LinearOperatorHandle& t) {
  const auto n = static_cast<Eigen::Index>(t.grid.size());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    e[c] = 1.0;
    m.col(c) = t.apply(e);
    e[c] = 0.0;
  }
  return m;
}

NormEstimate operator_norm(const LinearOperatorHandle& t, int max_iters, double tol, std::uint64_t seed) {
  VectorMap fwd = t.apply;
  VectorMap back = t.adjoint;
  if (!back) {
    auto m = std::make_shared<const Eigen::MatrixXd>(assemble(t));
    fwd = [m](const Eigen::VectorXd& v) { return Eigen::VectorXd(*m * v); };
    back = [m](const Eigen::VectorXd& v) { return Eigen::VectorXd(m->transpose() * v); };
  }
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.grid.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  NormEstimate out;
  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const Eigen::VectorXd w = back(fwd(v));
    lambda = v.dot(w);
    out.iterations = it;
    const double wn = w.norm();
    if (wn == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    const double residual = (w - lambda * v).norm();
    v = w / wn;
    if (residual <= tol * std::abs(lambda)) {
      out.converged = true;
      break;
    }
  }
  out.value = std::sqrt(std::max(0.0, lambda));
  return out;
}

}  // namespace dyadic
