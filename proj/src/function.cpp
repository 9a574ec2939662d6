#include "dyadic/function.hpp"

#include <cmath>

namespace dyadic {

DyadicFunction::DyadicFunction(Grid grid)
    : grid_(std::move(grid)), samples_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_.size()))) {}

DyadicFunction::DyadicFunction(Grid grid, Eigen::VectorXd samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (static_cast<std::size_t>(samples_.size()) != grid_.size())
    throw std::invalid_argument("sample vector length does not match the grid");
}

DyadicFunction DyadicFunction::constant(const Grid& grid, double c) {
  return {grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), c)};
}

double DyadicFunction::cell_weight() const { return 1.0 / static_cast<double>(grid_.size()); }

DyadicFunction& DyadicFunction::operator+=(const DyadicFunction& o) {
  require_same_grid(grid_, o.grid_, "operator+");
  samples_ += o.samples_;
  return *this;
}

DyadicFunction& DyadicFunction::operator-=(const DyadicFunction& o) {
  require_same_grid(grid_, o.grid_, "operator-");
  samples_ -= o.samples_;
  return *this;
}

DyadicFunction operator+(DyadicFunction a, const DyadicFunction& b) { return a += b; }
DyadicFunction operator-(DyadicFunction a, const DyadicFunction& b) { return a -= b; }
DyadicFunction operator*(double s, DyadicFunction a) { return a *= s; }

double inner_product(const DyadicFunction& f, const DyadicFunction& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return f.cell_weight() * f.samples().dot(g.samples());
}

double l2_norm(const DyadicFunction& f) { return std::sqrt(f.cell_weight()) * f.samples().norm(); }

double lp_norm(const DyadicFunction& f, double p) {
  return std::pow(f.cell_weight() * f.samples().array().abs().pow(p).sum(), 1.0 / p);
}

DyadicFunction pointwise_multiply(const DyadicFunction& f, const DyadicFunction& g) {
  require_same_grid(f.grid(), g.grid(), "pointwise_multiply");
  return {f.grid(), f.samples().cwiseProduct(g.samples())};
}

}  // namespace dyadic
