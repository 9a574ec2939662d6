#include "dyadic/paraproduct.hpp"

#include <cmath>
#include <stdexcept>

#include "dyadic/haar.hpp"

namespace dyadic {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Slot of the first signature of cube q at level k in the coefficient layout.
std::size_t slot_base(const Grid& g, int k, std::size_t q) { return g.cubes_at(k) + q * g.cancellative_count(); }

void check_length(const Grid& g, Eigen::Index n, const char* what) {
  if (static_cast<std::size_t>(n) != g.size()) throw std::invalid_argument(what);
}

Eigen::VectorXd bk_symbol_side(const Grid& g, const BkOperator& op, const Eigen::Ref<const Eigen::VectorXd>& b) {
  const Eigen::VectorXd c = analyze(g, b);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(g.total_cubes()));
  for (int lvl = op.k; lvl < g.depth(); ++lvl)
    for (std::size_t q = 0; q < g.cubes_at(lvl); ++q) {
      const Cube I{lvl, q};
      const Cube top = g.ancestor(I, op.k);
      const double beta = op.beta.size() ? op.beta[idx(g.flat(I))] : 1.0;
      out[idx(g.flat(I))] =
          beta * c[idx(slot_base(g, top.level, top.index) + op.sig_b)] / std::sqrt(g.volume(top));
    }
  return out;
}

Eigen::VectorXd bk_input_side(const Grid& g, const BkOperator& op, const Eigen::Ref<const Eigen::VectorXd>& f) {
  const HaarView view = haar_view(g, f);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(g.total_cubes()));
  for (int lvl = op.k; lvl < g.depth(); ++lvl)
    for (std::size_t q = 0; q < g.cubes_at(lvl); ++q) out[idx(g.flat({lvl, q}))] = view.pairing(g, {{lvl, q}, op.sig_in});
  return out;
}

Eigen::VectorXd bk_output_side(const Grid& g, const BkOperator& op, const Eigen::Ref<const Eigen::VectorXd>& v) {
  HaarAccumulator acc(g);
  for (int lvl = op.k; lvl < g.depth(); ++lvl)
    for (std::size_t q = 0; q < g.cubes_at(lvl); ++q) acc.add({{lvl, q}, op.sig_out}, v[idx(g.flat({lvl, q}))]);
  return acc.samples();
}

}  // namespace

void BkOperator::validate(const Grid& grid) const {
  if (k < 0) throw std::invalid_argument("B_k needs k >= 0");
  if (!grid.is_cancellative(sig_b)) throw std::invalid_argument("B_k pairs b with a cancellative Haar");
  const bool nc_in = !grid.is_cancellative(sig_in);
  const bool nc_out = !grid.is_cancellative(sig_out);
  if (sig_in > grid.noncancellative() || sig_out > grid.noncancellative() || sig_b > grid.noncancellative())
    throw InvalidIndex("B_k signature out of range");
  if (nc_in && nc_out) throw std::invalid_argument("B_k with two noncancellative signatures");
  if (k > 0 && (nc_in || nc_out)) throw std::invalid_argument("B_k with k > 0 must be cancellative");
  if (beta.size() != 0) {
    if (static_cast<std::size_t>(beta.size()) != grid.total_cubes())
      throw std::invalid_argument("beta sequence length does not match the grid");
    if (beta.cwiseAbs().maxCoeff() > 1.0 + 1e-12) throw std::invalid_argument("beta entries must satisfy |beta| <= 1");
  }
}

Eigen::VectorXd haar_product_beta(const Grid& grid, int k, Signature sig_b) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(idx(grid.total_cubes()));
  for (int lvl = k; lvl <= grid.depth(); ++lvl)
    for (std::size_t q = 0; q < grid.cubes_at(lvl); ++q) {
      const Cube I{lvl, q};
      if (k == 0) {
        beta[idx(grid.flat(I))] = 1.0;
        continue;
      }
      const Cube top = grid.ancestor(I, k);
      beta[idx(grid.flat(I))] = grid.haar_value_on({top, sig_b}, I) * std::sqrt(grid.volume(top));
    }
  return beta;
}

POperator POperator::from_symbol(const DyadicFunction& a, bool adjoint) {
  return {analyze(a.grid(), a.samples()), adjoint};
}

Eigen::Index form_size(const Grid& grid, const Form& form) {
  return std::holds_alternative<BkOperator>(form) ? idx(grid.total_cubes()) : idx(grid.size());
}

Eigen::VectorXd form_symbol_side(const Grid& g, const Form& form, const Eigen::Ref<const Eigen::VectorXd>& b) {
  check_length(g, b.size(), "form: symbol length does not match the grid");
  if (const auto* bk = std::get_if<BkOperator>(&form)) return bk_symbol_side(g, *bk, b);
  Eigen::VectorXd c = analyze(g, b);
  c[0] = 0.0;
  for (int k = 0; k < g.depth(); ++k) {
    const Eigen::Index n = idx(g.cubes_at(k) * g.cancellative_count());
    c.segment(idx(g.cubes_at(k)), n) /= g.volume(k);
  }
  return c;
}

Eigen::VectorXd form_input_side(const Grid& g, const Form& form, const Eigen::Ref<const Eigen::VectorXd>& f) {
  check_length(g, f.size(), "form: input length does not match the grid");
  if (const auto* bk = std::get_if<BkOperator>(&form)) return bk_input_side(g, *bk, f);
  const POperator& p = std::get<POperator>(form);
  Eigen::VectorXd c = analyze(g, f);
  c[0] = 0.0;
  if (!p.adjoint) return c;
  // sum over J strictly inside I of <a, h_J> <f, h_J>, spread over the signatures of I.
  return spread_signatures(g, strict_descendant_sums(g, signature_sums(g, p.symbol_coeffs.cwiseProduct(c))));
}

Eigen::VectorXd form_output_side(const Grid& g, const Form& form, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != form_size(g, form)) throw std::invalid_argument("form: index vector has the wrong length");
  if (const auto* bk = std::get_if<BkOperator>(&form)) return bk_output_side(g, *bk, v);
  const POperator& p = std::get<POperator>(form);
  Eigen::VectorXd c = v;
  c[0] = 0.0;
  if (p.adjoint) return synthesize(g, c);
  const Eigen::VectorXd above = spread_signatures(g, strict_ancestor_sums(g, signature_sums(g, c)));
  Eigen::VectorXd out = p.symbol_coeffs.cwiseProduct(above);
  out[0] = 0.0;
  return synthesize(g, out);
}

Form transpose(const Form& form) {
  if (const auto* bk = std::get_if<BkOperator>(&form)) {
    BkOperator t = *bk;
    std::swap(t.sig_in, t.sig_out);
    return t;
  }
  POperator p = std::get<POperator>(form);
  p.adjoint = !p.adjoint;
  return p;
}

Eigen::VectorXd apply_form(const Grid& grid, const Form& form, const Eigen::Ref<const Eigen::VectorXd>& b,
                           const Eigen::Ref<const Eigen::VectorXd>& g) {
  if (const auto* bk = std::get_if<BkOperator>(&form)) bk->validate(grid);
  return form_output_side(grid, form,
                          form_symbol_side(grid, form, b).cwiseProduct(form_input_side(grid, form, g)));
}

DyadicFunction apply_Bk(const BkOperator& op, const DyadicFunction& b, const DyadicFunction& f) {
  require_same_grid(b.grid(), f.grid(), "apply_Bk");
  return {f.grid(), apply_form(f.grid(), op, b.samples(), f.samples())};
}

DyadicFunction apply_P(const DyadicFunction& b, const DyadicFunction& a, const DyadicFunction& f) {
  require_same_grid(b.grid(), f.grid(), "apply_P");
  require_same_grid(a.grid(), f.grid(), "apply_P");
  return {f.grid(), apply_form(f.grid(), POperator::from_symbol(a), b.samples(), f.samples())};
}

DyadicFunction apply_P_adjoint(const DyadicFunction& b, const DyadicFunction& a, const DyadicFunction& f) {
  require_same_grid(b.grid(), f.grid(), "apply_P_adjoint");
  require_same_grid(a.grid(), f.grid(), "apply_P_adjoint");
  return {f.grid(), apply_form(f.grid(), POperator::from_symbol(a, true), b.samples(), f.samples())};
}

}  // namespace dyadic
