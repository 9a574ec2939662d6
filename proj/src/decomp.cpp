#include "dyadic/decomp.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dyadic/haar.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

BkOperator bk(const Grid& g, int k, Signature sb, Signature si, Signature so) {
  return {k, sb, si, so, haar_product_beta(g, k, sb)};
}

std::string kind_of(const TermFactor& f) {
  if (const auto* p = std::get_if<POperator>(&f.form)) return p->adjoint ? "Pstar_term" : "P_term";
  const bool nc = (f.pre && f.pre->kind() == ShiftKind::noncancellative) ||
                  (f.post && f.post->kind() == ShiftKind::noncancellative);
  if (f.pre) return nc ? "B0_of_S00f" : "Bk_of_Sf";
  if (f.post) return nc ? "S00_of_B0" : "S_of_Bk";
  return "Bk";
}

std::string kind_of(const TermFactor& a, const TermFactor& b) {
  const auto* p1 = std::get_if<POperator>(&a.form);
  const auto* p2 = std::get_if<POperator>(&b.form);
  if (p1 && p2) {
    if (p1->adjoint == p2->adjoint) return p1->adjoint ? "PP_term_adjoint" : "PP_term";
    return p1->adjoint ? "PP1_term" : "PP1_term_swapped";
  }
  if (!p1 && p2) return p2->adjoint ? "BPk_adjoint" : "BPk";
  if (p1 && !p2) return p1->adjoint ? "PBl_adjoint" : "PBl";
  const bool pre = a.pre || b.pre, post = a.post || b.post;
  if (pre && !post) return "Bkl_of_Sf";
  if (post && !pre) return "S_of_Bkl";
  return "S_of_Bkl_of_Sf";
}

Term make_term(std::string provenance, double weight, TermFactor factor) {
  Term t;
  t.kind = kind_of(factor);
  t.provenance = std::move(provenance);
  t.weight = weight;
  t.factors.push_back(std::move(factor));
  return t;
}

std::vector<Term> cancellative_terms(const ShiftRef& s, const std::string& name) {
  const Grid& g = s->grid();
  const unsigned m = g.cancellative_count();
  const Signature one = g.noncancellative();
  std::vector<Term> out;
  // Side 0 holds b (S f); side 1 holds S(b f) with the opposite sign.
  for (int side = 0; side < 2; ++side) {
    const int top = side == 0 ? s->j() : s->i();
    const double w = side == 0 ? 1.0 : -1.0;
    const std::string where = side == 0 ? "b.Sf" : "S(b.f)";
    auto factor = [&](Form form) {
      TermFactor f{std::move(form), nullptr, nullptr, "", ""};
      if (side == 0) {
        f.pre = s;
        f.pre_name = name;
      } else {
        f.post = s;
        f.post_name = name;
      }
      return f;
    };
    for (Signature e = 0; e < m; ++e)
      out.push_back(make_term(where + ": b coefficient against average on I", w, factor(bk(g, 0, e, one, e))));
    for (int k = 0; k <= top; ++k)
      for (Signature sb = 0; sb < m; ++sb)
        for (Signature sg = 0; sg < m; ++sg) {
          if (k == 0)
            out.push_back(make_term(where + ": same-cube product", w,
                                    factor(bk(g, 0, sb, sg, product_signature(sb, sg, one)))));
          else
            out.push_back(make_term(where + ": average difference across " + std::to_string(k) + " levels", w,
                                    factor(bk(g, k, sb, sg, sg))));
        }
  }
  return out;
}

// Analysis orientation: S f = sum_I <f>_I sum_eps <a, h_I^eps> h_I^eps.
std::vector<Term> analysis_terms(const ShiftRef& s, const std::string& name) {
  const Grid& g = s->grid();
  const unsigned m = g.cancellative_count();
  const Signature one = g.noncancellative();
  auto pre = [&](Form form) { return TermFactor{std::move(form), s, nullptr, name, ""}; };
  auto post = [&](Form form) { return TermFactor{std::move(form), nullptr, s, "", name}; };
  std::vector<Term> out;
  for (Signature e = 0; e < m; ++e)
    out.push_back(make_term("b.Sf: b coefficient against average on I", 1.0, pre(bk(g, 0, e, one, e))));
  for (Signature e = 0; e < m; ++e)
    for (Signature sg = 0; sg < m; ++sg)
      out.push_back(make_term("b.Sf: same-cube product", 1.0, pre(bk(g, 0, e, sg, product_signature(e, sg, one)))));
  out.push_back(make_term("b.Sf - S(b.f): symbol below the cube of b and f", 1.0,
                          {POperator::from_symbol(*s->symbol()), nullptr, nullptr, "", ""}));
  for (Signature e = 0; e < m; ++e)
    out.push_back(make_term("S(b.f): average of b.f on I", -1.0, post(bk(g, 0, e, e, one))));
  return out;
}

std::string adjoint_name(const std::string& name) {
  return name.size() > 1 && name.back() == '*' ? name.substr(0, name.size() - 1) : name + "*";
}

// [b, T*] = -([b, T])*: transpose every term of the adjoint shift.
std::vector<Term> transposed(const std::vector<Term>& terms, const ShiftRef& self, const std::string& name) {
  std::vector<Term> out;
  for (const Term& t : terms) {
    const TermFactor& f = t.factors.front();
    TermFactor g{transpose(f.form), nullptr, nullptr, "", ""};
    if (f.post) {
      g.pre = self;
      g.pre_name = name;
    }
    if (f.pre) {
      g.post = self;
      g.post_name = name;
    }
    Term u = make_term("adjoint of [" + t.provenance + "]", -t.weight, std::move(g));
    u.adjoint = true;
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Term> one_param_terms(const ShiftRef& s, const std::string& name) {
  if (s->kind() == ShiftKind::cancellative) return cancellative_terms(s, name);
  if (s->orientation() == Orientation::analysis) return analysis_terms(s, name);
  const auto adj = std::make_shared<const ShiftOperator>(adjoint(*s));
  return transposed(analysis_terms(adj, adjoint_name(name)), s, name);
}

double scale_of(double bmo, double sup) {
  if (bmo > 0.0) return bmo;
  if (sup > 0.0) return sup;
  return 1.0;
}

}  // namespace

int cancellative_count_constant(int d) {
  const int m = (1 << d) - 1;
  return 2 * m * (m + 1);
}

std::size_t cancellative_term_count(int d, int i, int j) {
  const std::size_t m = (std::size_t{1} << d) - 1;
  return m * m * static_cast<std::size_t>(i + j + 2) + 2 * m;
}

std::size_t noncancellative_term_count(int d) {
  const std::size_t m1 = std::size_t{1} << d;
  return m1 * m1;
}

TermList decompose_cancellative(const DyadicFunction& b, const ShiftOperator& s) {
  if (s.kind() != ShiftKind::cancellative) throw WrongKind("decompose_cancellative needs a cancellative shift");
  require_same_grid(b.grid(), s.grid(), "decompose_cancellative");
  TermList out;
  out.terms = cancellative_terms(std::make_shared<const ShiftOperator>(s), "S");
  out.b = b;
  return out;
}

TermList decompose_noncancellative(const DyadicFunction& b, const ShiftOperator& s) {
  if (s.kind() != ShiftKind::noncancellative)
    throw WrongKind("decompose_noncancellative needs a noncancellative shift");
  require_same_grid(b.grid(), s.grid(), "decompose_noncancellative");
  TermList out;
  out.terms = one_param_terms(std::make_shared<const ShiftOperator>(s), "S");
  out.b = b;
  return out;
}

TermList decompose(const DyadicFunction& b, const ShiftOperator& s) {
  return s.kind() == ShiftKind::cancellative ? decompose_cancellative(b, s) : decompose_noncancellative(b, s);
}

TermList decompose_biparam(const ProductFunction& b, const ShiftOperator& s1, const ShiftOperator& s2) {
  if (!(b.grid().first == s1.grid())) throw VariableRoleError("S1 does not act on variable 1 of b");
  if (!(b.grid().second == s2.grid())) throw VariableRoleError("S2 does not act on variable 2 of b");
  const auto t1 = one_param_terms(std::make_shared<const ShiftOperator>(s1), "S1");
  const auto t2 = one_param_terms(std::make_shared<const ShiftOperator>(s2), "S2");
  TermList out;
  out.terms.reserve(t1.size() * t2.size());
  for (const Term& a : t1)
    for (const Term& c : t2) {
      Term t;
      t.kind = kind_of(a.factors.front(), c.factors.front());
      t.provenance = "var1 {" + a.provenance + "} x var2 {" + c.provenance + "}";
      t.weight = a.weight * c.weight;
      t.adjoint = a.adjoint || c.adjoint;
      t.factors = {a.factors.front(), c.factors.front()};
      out.terms.push_back(std::move(t));
    }
  out.b2 = b;
  return out;
}

DyadicFunction evaluate_term(const TermList& t, std::size_t index, const DyadicFunction& f) {
  if (!t.b) throw std::invalid_argument("term list is bi-parameter");
  const Grid& g = t.b->grid();
  require_same_grid(g, f.grid(), "evaluate_term");
  const Term& term = t.terms.at(index);
  const TermFactor& fa = term.factors.front();
  Eigen::VectorXd v = fa.pre ? apply_shift(*fa.pre, f.samples()) : f.samples();
  v = apply_form(g, fa.form, t.b->samples(), v);
  if (fa.post) v = apply_shift(*fa.post, v);
  return {g, term.weight * v};
}

DyadicFunction evaluate_terms(const TermList& t, const DyadicFunction& f) {
  if (!t.b) throw std::invalid_argument("term list is bi-parameter");
  DyadicFunction out(t.b->grid());
  for (std::size_t x = 0; x < t.size(); ++x) out += evaluate_term(t, x, f);
  return out;
}

ProductFunction evaluate_term(const TermList& t, std::size_t index, const ProductFunction& f) {
  if (!t.b2) throw std::invalid_argument("term list is one-parameter");
  require_same_grid(t.b2->grid(), f.grid(), "evaluate_term");
  const Term& term = t.terms.at(index);
  const TermFactor& f1 = term.factors.at(0);
  const TermFactor& f2 = term.factors.at(1);
  ProductFunction g = f;
  if (f1.pre) g = apply_in_variable(*f1.pre, 1, g);
  if (f2.pre) g = apply_in_variable(*f2.pre, 2, g);
  ProductFunction v = apply_form_pair(f1.form, f2.form, *t.b2, g);
  if (f1.post) v = apply_in_variable(*f1.post, 1, v);
  if (f2.post) v = apply_in_variable(*f2.post, 2, v);
  v *= term.weight;
  return v;
}

ProductFunction evaluate_terms(const TermList& t, const ProductFunction& f) {
  if (!t.b2) throw std::invalid_argument("term list is one-parameter");
  ProductFunction out(t.b2->grid());
  for (std::size_t x = 0; x < t.size(); ++x) out += evaluate_term(t, x, f);
  return out;
}

DyadicFunction commutator(const DyadicFunction& b, const ShiftOperator& s, const DyadicFunction& f) {
  return pointwise_multiply(b, apply_shift(s, f)) - apply_shift(s, pointwise_multiply(b, f));
}

double identity_residual(const TermList& t, const DyadicFunction& lhs, const DyadicFunction& f) {
  const double scale = scale_of(dyadic_bmo_norm(*t.b), t.b->samples().cwiseAbs().maxCoeff());
  const double fn = l2_norm(f);
  if (fn == 0.0) return l2_norm(lhs - evaluate_terms(t, f));
  return l2_norm(lhs - evaluate_terms(t, f)) / (scale * fn);
}

double identity_residual(const TermList& t, const ProductFunction& lhs, const ProductFunction& f) {
  const double scale = scale_of(rect_bmo_norm(*t.b2), t.b2->samples().cwiseAbs().maxCoeff());
  const double fn = l2_norm(f);
  if (fn == 0.0) return l2_norm(lhs - evaluate_terms(t, f));
  return l2_norm(lhs - evaluate_terms(t, f)) / (scale * fn);
}

double same_cube_residual(const ShiftOperator& s) {
  const Grid& g = s.grid();
  const bool synthesis = s.kind() == ShiftKind::noncancellative && s.orientation() == Orientation::synthesis;
  const ShiftOperator op = synthesis ? adjoint(s) : s;
  double worst = 0.0;
  for (int k = 0; k < g.depth(); ++k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q)
      for (Signature e = 0; e < g.cancellative_count(); ++e) {
        const auto h = haar_function(g, {{k, q}, e});
        for (Signature e2 = 0; e2 < g.cancellative_count(); ++e2)
          if (e2 != e) worst = std::max(worst, l2_norm(commutator(h, op, haar_function(g, {{k, q}, e2}))));
      }
  return worst;
}

std::string case_label(const ShiftOperator& s) {
  if (s.kind() == ShiftKind::cancellative) return "cancellative";
  return s.orientation() == Orientation::analysis ? "noncancellative-analysis" : "noncancellative-synthesis";
}

IdentityReport verify_identity(const TermList& t, const ShiftOperator& s, int trials, std::uint64_t seed,
                               double tolerance) {
  IdentityReport r;
  r.label = case_label(s);
  r.d = s.grid().dim();
  r.N = s.grid().depth();
  r.i = s.i();
  r.j = s.j();
  r.term_count = t.size();
  r.trials = trials;
  r.tolerance = tolerance;
  r.seed = seed;
  for (int x = 0; x < trials; ++x) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(x)));
    const DyadicFunction f = random_function(s.grid(), rng);
    r.max_residual = std::max(r.max_residual, identity_residual(t, commutator(*t.b, s, f), f));
  }
  r.pass = r.max_residual < tolerance;
  return r;
}

IdentityReport verify_identity(const TermList& t, const ShiftOperator& s1, const ShiftOperator& s2, int trials,
                               std::uint64_t seed, double tolerance) {
  auto tag = [](const ShiftOperator& s) {
    if (s.kind() == ShiftKind::cancellative) return std::string("c");
    return std::string(s.orientation() == Orientation::analysis ? "n" : "n*");
  };
  IdentityReport r;
  r.label = tag(s1) + "/" + tag(s2);
  r.d = s1.grid().dim();
  r.N = s1.grid().depth();
  r.i = s1.i();
  r.j = s1.j();
  r.i2 = s2.i();
  r.j2 = s2.j();
  r.term_count = t.size();
  r.trials = trials;
  r.tolerance = tolerance;
  r.seed = seed;
  for (int x = 0; x < trials; ++x) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(x)));
    const ProductFunction f = random_function(t.b2->grid(), rng);
    r.max_residual = std::max(r.max_residual, identity_residual(t, iterated_commutator(*t.b2, s1, s2, f), f));
  }
  r.pass = r.max_residual < tolerance;
  return r;
}

std::string to_json_line(const IdentityReport& r) {
  nlohmann::ordered_json j = {{"case", r.label}, {"d", r.d}, {"N", r.N}, {"i", r.i}, {"j", r.j}};
  if (r.label.find('/') != std::string::npos) {
    j["i2"] = r.i2;
    j["j2"] = r.j2;
  }
  j["term_count"] = r.term_count;
  j["trials"] = r.trials;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["seed"] = r.seed;
  return j.dump();
}

}  // namespace dyadic
