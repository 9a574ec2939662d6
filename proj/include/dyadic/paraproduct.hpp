#pragma once

#include <variant>

#include "dyadic/function.hpp"

namespace dyadic {

/// B_k(b, f) = sum_I beta_I <b, h_{I^{(k)}}^{sig_b}> <f, h_I^{sig_in}> h_I^{sig_out} |I^{(k)}|^{-1/2}.
///
/// `beta` is indexed by flat cube (Grid::flat); empty means beta = 1.
/// At most one of sig_in, sig_out may be noncancellative, and only for k = 0.
struct BkOperator {
  int k = 0;
  Signature sig_b = 0;
  Signature sig_in = 0;
  Signature sig_out = 0;
  Eigen::VectorXd beta;

  void validate(const Grid& grid) const;
};

/// beta_I = h_{I^{(k)}}^{sig_b}(x) |I^{(k)}|^{1/2} for x in I, one entry per flat cube
/// (zero where I^{(k)} does not exist).
Eigen::VectorXd haar_product_beta(const Grid& grid, int k, Signature sig_b);

/// P(b, a, f) = sum_{I, eps} <b, h_I^eps> <f, h_I^eps> |I|^{-1} sum_{J strictly inside I} <a, h_J> h_J,
/// or its adjoint in f with b, a fixed.
struct POperator {
  Eigen::VectorXd symbol_coeffs;  // Haar coefficients of a
  bool adjoint = false;

  static POperator from_symbol(const DyadicFunction& a, bool adjoint = false);
};

/// A bilinear core(b, g) = Phi(Psi b .* X g) with the three maps linear.
/// Both paraproducts and P have this shape, which lets the bi-parameter
/// operators be built as tensor products one variable at a time.
using Form = std::variant<BkOperator, POperator>;

Eigen::Index form_size(const Grid& grid, const Form& form);
Eigen::VectorXd form_symbol_side(const Grid& grid, const Form& form,
                                 const Eigen::Ref<const Eigen::VectorXd>& b);
Eigen::VectorXd form_input_side(const Grid& grid, const Form& form,
                                const Eigen::Ref<const Eigen::VectorXd>& g);
Eigen::VectorXd form_output_side(const Grid& grid, const Form& form,
                                 const Eigen::Ref<const Eigen::VectorXd>& v);
/// The same form with input and output roles exchanged (transpose in g).
Form transpose(const Form& form);

Eigen::VectorXd apply_form(const Grid& grid, const Form& form, const Eigen::Ref<const Eigen::VectorXd>& b,
                           const Eigen::Ref<const Eigen::VectorXd>& g);

DyadicFunction apply_Bk(const BkOperator& op, const DyadicFunction& b, const DyadicFunction& f);
DyadicFunction apply_P(const DyadicFunction& b, const DyadicFunction& a, const DyadicFunction& f);
DyadicFunction apply_P_adjoint(const DyadicFunction& b, const DyadicFunction& a, const DyadicFunction& f);

}  // namespace dyadic
