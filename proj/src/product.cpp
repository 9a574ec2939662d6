#include "dyadic/product.hpp"

#include <stdexcept>

#include "dyadic/haar.hpp"

namespace dyadic {

namespace {

Eigen::Index rows_of(const ProductGrid& g) { return static_cast<Eigen::Index>(g.first.size()); }
Eigen::Index cols_of(const ProductGrid& g) { return static_cast<Eigen::Index>(g.second.size()); }

Eigen::MatrixXd transform2(const ProductGrid& g, const Eigen::MatrixXd& m, bool forward) {
  auto one = [&](const Grid& grid) {
    return [&grid, forward](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return forward ? analyze(grid, v) : synthesize(grid, v);
    };
  };
  return map_variable(map_variable(m, 1, one(g.first)), 2, one(g.second));
}

// Cube owning a cancellative coefficient slot.
Cube cube_of_slot(const Grid& g, std::size_t slot) { return haar_index_at(g, slot).cube; }

}  // namespace

ProductFunction::ProductFunction(ProductGrid grid)
    : grid_(std::move(grid)), samples_(Eigen::MatrixXd::Zero(rows_of(grid_), cols_of(grid_))) {}

ProductFunction::ProductFunction(ProductGrid grid, Eigen::MatrixXd samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.rows() != rows_of(grid_) || samples_.cols() != cols_of(grid_))
    throw std::invalid_argument("product sample matrix does not match the grids");
}

ProductFunction ProductFunction::tensor(const DyadicFunction& f1, const DyadicFunction& f2) {
  return {{f1.grid(), f2.grid()}, f1.samples() * f2.samples().transpose()};
}

ProductFunction ProductFunction::constant(const ProductGrid& grid, double c) {
  return {grid, Eigen::MatrixXd::Constant(rows_of(grid), cols_of(grid), c)};
}

double ProductFunction::cell_weight() const { return 1.0 / static_cast<double>(samples_.size()); }

ProductFunction& ProductFunction::operator+=(const ProductFunction& o) {
  require_same_grid(grid_, o.grid_, "operator+=");
  samples_ += o.samples_;
  return *this;
}

ProductFunction& ProductFunction::operator-=(const ProductFunction& o) {
  require_same_grid(grid_, o.grid_, "operator-=");
  samples_ -= o.samples_;
  return *this;
}

ProductFunction operator+(ProductFunction a, const ProductFunction& b) { return a += b; }
ProductFunction operator-(ProductFunction a, const ProductFunction& b) { return a -= b; }
ProductFunction operator*(double s, ProductFunction a) { return a *= s; }

void require_same_grid(const ProductGrid& a, const ProductGrid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": product grids differ");
}

double inner_product(const ProductFunction& f, const ProductFunction& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return f.samples().cwiseProduct(g.samples()).sum() * f.cell_weight();
}

double l2_norm(const ProductFunction& f) { return f.samples().norm() * std::sqrt(f.cell_weight()); }

ProductFunction pointwise_multiply(const ProductFunction& f, const ProductFunction& g) {
  require_same_grid(f.grid(), g.grid(), "pointwise_multiply");
  return {f.grid(), f.samples().cwiseProduct(g.samples())};
}

ProductFunction random_function(const ProductGrid& grid, Rng& rng) {
  ProductFunction p(grid);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < p.samples().size(); ++i) p.samples().data()[i] = normal(rng);
  return p;
}

Eigen::MatrixXd partial_forward(const ProductFunction& f, int var) {
  const Grid g = f.grid()[var];
  return map_variable(f.samples(), var, [&g](const Eigen::VectorXd& v) { return analyze(g, v); });
}

Eigen::MatrixXd haar_forward(const ProductFunction& f) { return transform2(f.grid(), f.samples(), true); }

ProductFunction haar_inverse(const ProductGrid& grid, const Eigen::MatrixXd& coeffs) {
  return {grid, transform2(grid, coeffs, false)};
}

ProductFunction apply_in_variable(const ShiftOperator& s, int var, const ProductFunction& f) {
  if (var != 1 && var != 2) throw std::invalid_argument("variable must be 1 or 2");
  require_same_grid(s.grid(), f.grid()[var], "apply_in_variable");
  return {f.grid(), map_variable(f.samples(), var, [&s](const Eigen::VectorXd& v) { return apply_shift(s, v); })};
}

ProductFunction iterated_commutator(const ProductFunction& b, const ShiftOperator& s1, const ShiftOperator& s2,
                                    const ProductFunction& f) {
  require_same_grid(b.grid(), f.grid(), "iterated_commutator");
  auto inner = [&](const ProductFunction& g) {
    return pointwise_multiply(b, apply_in_variable(s1, 1, g)) - apply_in_variable(s1, 1, pointwise_multiply(b, g));
  };
  return inner(apply_in_variable(s2, 2, f)) - apply_in_variable(s2, 2, inner(f));
}

ProductFunction apply_form_pair(const Form& first, const Form& second, const ProductFunction& b,
                                const ProductFunction& f) {
  require_same_grid(b.grid(), f.grid(), "apply_form_pair");
  const Grid g1 = f.grid().first;
  const Grid g2 = f.grid().second;
  if (const auto* bk = std::get_if<BkOperator>(&first)) bk->validate(g1);
  if (const auto* bk = std::get_if<BkOperator>(&second)) bk->validate(g2);
  const Eigen::MatrixXd psi =
      map_variable(map_variable(b.samples(), 1, [&](const Eigen::VectorXd& v) { return form_symbol_side(g1, first, v); }),
                   2, [&](const Eigen::VectorXd& v) { return form_symbol_side(g2, second, v); });
  const Eigen::MatrixXd x =
      map_variable(map_variable(f.samples(), 1, [&](const Eigen::VectorXd& v) { return form_input_side(g1, first, v); }),
                   2, [&](const Eigen::VectorXd& v) { return form_input_side(g2, second, v); });
  const Eigen::MatrixXd prod = psi.cwiseProduct(x);
  return {f.grid(),
          map_variable(map_variable(prod, 1, [&](const Eigen::VectorXd& v) { return form_output_side(g1, first, v); }),
                       2, [&](const Eigen::VectorXd& v) { return form_output_side(g2, second, v); })};
}

std::string to_string(BiparamKind k) {
  switch (k) {
    case BiparamKind::Bkl: return "Bkl";
    case BiparamKind::PP: return "PP";
    case BiparamKind::PP1: return "PP1";
    case BiparamKind::BPk: return "BPk";
    case BiparamKind::PBl: return "PBl";
  }
  return "?";
}

namespace {

// <b, h_R> / (|I1||I2|) over cancellative rectangles, zero on mean rows/columns.
Eigen::MatrixXd scaled_symbol(const ProductGrid& g, const ProductFunction& b) {
  const POperator probe{};
  return map_variable(
      map_variable(b.samples(), 1, [&](const Eigen::VectorXd& v) { return form_symbol_side(g.first, probe, v); }), 2,
      [&](const Eigen::VectorXd& v) { return form_symbol_side(g.second, probe, v); });
}

Eigen::MatrixXd cancellative_coeffs(const ProductFunction& f) {
  Eigen::MatrixXd c = haar_forward(f);
  c.row(0).setZero();
  c.col(0).setZero();
  return c;
}

ProductFunction apply_pp(const ProductFunction& b, const ProductFunction& a, const ProductFunction& f) {
  const ProductGrid& g = f.grid();
  const Eigen::MatrixXd v = scaled_symbol(g, b).cwiseProduct(cancellative_coeffs(f));
  // Per rectangle weight, then summed over strictly larger rectangles.
  Eigen::MatrixXd w = map_variable(v, 1, [&](const Eigen::VectorXd& x) { return signature_sums(g.first, x); });
  w = map_variable(w, 2, [&](const Eigen::VectorXd& x) { return signature_sums(g.second, x); });
  w = map_variable(w, 1, [&](const Eigen::VectorXd& x) { return strict_ancestor_sums(g.first, x); });
  w = map_variable(w, 2, [&](const Eigen::VectorXd& x) { return strict_ancestor_sums(g.second, x); });
  w = map_variable(w, 1, [&](const Eigen::VectorXd& x) { return spread_signatures(g.first, x); });
  w = map_variable(w, 2, [&](const Eigen::VectorXd& x) { return spread_signatures(g.second, x); });
  return haar_inverse(g, cancellative_coeffs(a).cwiseProduct(w));
}

ProductFunction apply_pp1(const ProductFunction& b, const ProductFunction& a, const ProductFunction& f) {
  const ProductGrid& g = f.grid();
  const Eigen::MatrixXd bs = scaled_symbol(g, b);
  const Eigen::MatrixXd ac = cancellative_coeffs(a);
  const Eigen::MatrixXd fc = cancellative_coeffs(f);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(fc.rows(), fc.cols());
  // out[(I1,e1),(J2,s2)] = sum_{I2 strictly containing J2} sum_{e2} bs[(I1,e1),(I2,e2)]
  //                       * sum_{J1 strictly inside I1} sum_{s1} a[(J1,s1),(J2,s2)] f[(J1,s1),(I2,e2)]
  for (std::size_t t = 1; t < g.second.size(); ++t) {
    const Cube j2 = cube_of_slot(g.second, t);
    for (int up = 1; up <= j2.level; ++up) {
      const Cube i2 = g.second.ancestor(j2, up);
      const std::size_t base = g.second.cubes_at(i2.level) + i2.index * g.second.cancellative_count();
      for (unsigned e2 = 0; e2 < g.second.cancellative_count(); ++e2) {
        const auto u = static_cast<Eigen::Index>(base + e2);
        const Eigen::VectorXd prod = ac.col(static_cast<Eigen::Index>(t)).cwiseProduct(fc.col(u));
        const Eigen::VectorXd inner =
            spread_signatures(g.first, strict_descendant_sums(g.first, signature_sums(g.first, prod)));
        out.col(static_cast<Eigen::Index>(t)) += bs.col(u).cwiseProduct(inner);
      }
    }
  }
  return haar_inverse(g, out);
}

}  // namespace

ProductFunction apply_biparam(const BiparamSpec& spec, const ProductFunction& b, const ProductFunction& f) {
  require_same_grid(b.grid(), f.grid(), "apply_biparam");
  switch (spec.kind) {
    case BiparamKind::Bkl:
      return apply_form_pair(spec.first, spec.second, b, f);
    case BiparamKind::BPk:
      if (!spec.symbol2) throw std::invalid_argument("BP_k needs the variable-2 symbol");
      require_same_grid(spec.symbol2->grid(), f.grid().second, "apply_biparam");
      return apply_form_pair(spec.first, POperator::from_symbol(*spec.symbol2), b, f);
    case BiparamKind::PBl:
      if (!spec.symbol1) throw std::invalid_argument("PB_l needs the variable-1 symbol");
      require_same_grid(spec.symbol1->grid(), f.grid().first, "apply_biparam");
      return apply_form_pair(POperator::from_symbol(*spec.symbol1), spec.second, b, f);
    case BiparamKind::PP:
    case BiparamKind::PP1:
      if (!spec.symbol) throw std::invalid_argument("PP needs a product symbol");
      require_same_grid(spec.symbol->grid(), f.grid(), "apply_biparam");
      return spec.kind == BiparamKind::PP ? apply_pp(b, *spec.symbol, f) : apply_pp1(b, *spec.symbol, f);
  }
  throw std::invalid_argument("unknown bi-parameter kind");
}

}  // namespace dyadic
