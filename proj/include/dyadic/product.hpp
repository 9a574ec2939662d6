#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "dyadic/paraproduct.hpp"
#include "dyadic/random.hpp"
#include "dyadic/shift.hpp"

namespace dyadic {

/// Tensor product of two dyadic grids; variable 1 indexes rows.
struct ProductGrid {
  Grid first;
  Grid second;

  Grid operator[](int var) const { return var == 1 ? first : second; }
  friend bool operator==(const ProductGrid& a, const ProductGrid& b) {
    return a.first == b.first && a.second == b.second;
  }
};

class ProductFunction {
 public:
  explicit ProductFunction(ProductGrid grid);
  ProductFunction(ProductGrid grid, Eigen::MatrixXd samples);

  static ProductFunction tensor(const DyadicFunction& f1, const DyadicFunction& f2);
  static ProductFunction constant(const ProductGrid& grid, double c);

  const ProductGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& samples() const { return samples_; }
  Eigen::MatrixXd& samples() { return samples_; }

  double cell_weight() const;

  ProductFunction& operator+=(const ProductFunction& o);
  ProductFunction& operator-=(const ProductFunction& o);
  ProductFunction& operator*=(double s) {
    samples_ *= s;
    return *this;
  }

 private:
  ProductGrid grid_;
  Eigen::MatrixXd samples_;
};

ProductFunction operator+(ProductFunction a, const ProductFunction& b);
ProductFunction operator-(ProductFunction a, const ProductFunction& b);
ProductFunction operator*(double s, ProductFunction a);

void require_same_grid(const ProductGrid& a, const ProductGrid& b, const char* what);
double inner_product(const ProductFunction& f, const ProductFunction& g);
double l2_norm(const ProductFunction& f);
ProductFunction pointwise_multiply(const ProductFunction& f, const ProductFunction& g);
/// i.i.d. standard normal samples on a product grid.
ProductFunction random_function(const ProductGrid& grid, Rng& rng);

/// Apply a vector map to every column (var = 1) or every row (var = 2).
/// The map may change the length along the active variable.
template <class Map>
Eigen::MatrixXd map_variable(const Eigen::Ref<const Eigen::MatrixXd>& m, int var, Map&& fn) {
  if (var == 1) {
    Eigen::MatrixXd out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      Eigen::VectorXd v = fn(Eigen::VectorXd(m.col(c)));
      if (c == 0) out.resize(v.size(), m.cols());
      out.col(c) = v;
    }
    return out;
  }
  Eigen::MatrixXd out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::VectorXd v = fn(Eigen::VectorXd(m.row(r).transpose()));
    if (r == 0) out.resize(m.rows(), v.size());
    out.row(r) = v.transpose();
  }
  return out;
}

/// Partial Haar transform in one variable (coefficient layout of that grid).
Eigen::MatrixXd partial_forward(const ProductFunction& f, int var);
/// Full coefficient matrix: transform in both variables.
Eigen::MatrixXd haar_forward(const ProductFunction& f);
ProductFunction haar_inverse(const ProductGrid& grid, const Eigen::MatrixXd& coeffs);

ProductFunction apply_in_variable(const ShiftOperator& s, int var, const ProductFunction& f);
/// [[M_b, S1], S2] f with S1 acting in variable 1 and S2 in variable 2.
ProductFunction iterated_commutator(const ProductFunction& b, const ShiftOperator& s1, const ShiftOperator& s2,
                                    const ProductFunction& f);

/// core1 (x) core2 applied to (b, f): Phi1 Phi2 (Psi1 Psi2 b .* X1 X2 f).
ProductFunction apply_form_pair(const Form& first, const Form& second, const ProductFunction& b,
                                const ProductFunction& f);

enum class BiparamKind { Bkl, PP, PP1, BPk, PBl };

std::string to_string(BiparamKind k);

/// Parameters of one bi-parameter operator.
///   Bkl: paraproducts `first` and `second` in each variable.
///   BPk: paraproduct `first` in variable 1, P with symbol `symbol2` in variable 2.
///   PBl: P with symbol `symbol1` in variable 1, paraproduct `second` in variable 2.
///   PP, PP1: general product symbol `symbol`; PP1 is the partial adjoint of PP
///            in variable 1.
struct BiparamSpec {
  BiparamKind kind = BiparamKind::Bkl;
  BkOperator first;
  BkOperator second;
  std::optional<ProductFunction> symbol;
  std::optional<DyadicFunction> symbol1;
  std::optional<DyadicFunction> symbol2;
};

ProductFunction apply_biparam(const BiparamSpec& spec, const ProductFunction& b, const ProductFunction& f);

}  // namespace dyadic
