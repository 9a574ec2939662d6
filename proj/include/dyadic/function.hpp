#pragma once

#include <Eigen/Core>

#include "dyadic/grid.hpp"

namespace dyadic {

/// Piecewise-constant function on the finest cells of a grid.
/// Samples are ordered row-major with axis 1 slowest.
class DyadicFunction {
 public:
  explicit DyadicFunction(Grid grid);
  DyadicFunction(Grid grid, Eigen::VectorXd samples);

  static DyadicFunction constant(const Grid& grid, double c);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& samples() const { return samples_; }
  Eigen::VectorXd& samples() { return samples_; }
  double operator[](Eigen::Index cell) const { return samples_[cell]; }

  /// Quadrature weight 2^{-Nd} of a single finest cell.
  double cell_weight() const;
  /// Average over the whole torus, <f, h_root^1>.
  double mean() const { return samples_.mean(); }

  DyadicFunction& operator+=(const DyadicFunction& o);
  DyadicFunction& operator-=(const DyadicFunction& o);
  DyadicFunction& operator*=(double s) {
    samples_ *= s;
    return *this;
  }

 private:
  Grid grid_;
  Eigen::VectorXd samples_;
};

DyadicFunction operator+(DyadicFunction a, const DyadicFunction& b);
DyadicFunction operator-(DyadicFunction a, const DyadicFunction& b);
DyadicFunction operator*(double s, DyadicFunction a);

double inner_product(const DyadicFunction& f, const DyadicFunction& g);
double l2_norm(const DyadicFunction& f);
/// (integral |f|^p)^{1/p} with the cell quadrature.
double lp_norm(const DyadicFunction& f, double p);
DyadicFunction pointwise_multiply(const DyadicFunction& f, const DyadicFunction& g);

}  // namespace dyadic
