#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/paraproduct.hpp"
#include "dyadic/product.hpp"
#include "dyadic/shift.hpp"

namespace dyadic {

class WrongKind : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VariableRoleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using ShiftRef = std::shared_ptr<const ShiftOperator>;

/// One variable of a term: post(core(b, pre f)). Missing shifts act as the identity.
struct TermFactor {
  Form form;
  ShiftRef pre;
  ShiftRef post;
  std::string pre_name;
  std::string post_name;
};

/// weight * (factor_1 (x) factor_2)(b, f). One-parameter terms have one factor.
struct Term {
  std::string kind;
  std::string provenance;
  double weight = 1.0;
  bool adjoint = false;  // obtained by transposing a term of the adjoint shift
  std::vector<TermFactor> factors;
};

struct TermList {
  std::vector<Term> terms;
  std::optional<DyadicFunction> b;
  std::optional<ProductFunction> b2;

  std::size_t size() const { return terms.size(); }
  bool biparam() const { return b2.has_value(); }
};

/// Constant C of the one-parameter count bound |terms| <= C (1 + max(i, j)).
int cancellative_count_constant(int d);
/// Exact number of terms emitted for a cancellative shift.
std::size_t cancellative_term_count(int d, int i, int j);
/// Exact number of terms emitted for a noncancellative shift.
std::size_t noncancellative_term_count(int d);

TermList decompose_cancellative(const DyadicFunction& b, const ShiftOperator& s);
/// Either orientation; throws WrongKind on a cancellative shift.
TermList decompose_noncancellative(const DyadicFunction& b, const ShiftOperator& s);
/// Dispatches on the kind of `s`.
TermList decompose(const DyadicFunction& b, const ShiftOperator& s);
/// Terms of [[M_b, S1], S2] with S1 acting in variable 1 and S2 in variable 2.
TermList decompose_biparam(const ProductFunction& b, const ShiftOperator& s1, const ShiftOperator& s2);

DyadicFunction evaluate_term(const TermList& t, std::size_t index, const DyadicFunction& f);
DyadicFunction evaluate_terms(const TermList& t, const DyadicFunction& f);
ProductFunction evaluate_term(const TermList& t, std::size_t index, const ProductFunction& f);
ProductFunction evaluate_terms(const TermList& t, const ProductFunction& f);

/// b S f - S(b f).
DyadicFunction commutator(const DyadicFunction& b, const ShiftOperator& s, const DyadicFunction& f);

struct IdentityReport {
  std::string label;  // "cancellative", "noncancellative-analysis", "cc", "cn", ...
  int d = 1;
  int N = 1;
  int i = 0;
  int j = 0;
  int i2 = 0;
  int j2 = 0;
  std::size_t term_count = 0;
  int trials = 0;
  double max_residual = 0.0;
  double tolerance = 1e-9;
  bool pass = false;
  std::uint64_t seed = 0;
};

/// Relative residual ||lhs - rhs|| / (scale ||f||), scale = BMO norm of b
/// (falling back to max |b|, then 1, when that vanishes).
double identity_residual(const TermList& t, const DyadicFunction& lhs, const DyadicFunction& f);
double identity_residual(const TermList& t, const ProductFunction& lhs, const ProductFunction& f);

/// Draws `trials` random f and compares the term sum with the direct commutator.
IdentityReport verify_identity(const TermList& t, const ShiftOperator& s, int trials, std::uint64_t seed,
                               double tolerance = 1e-9);
IdentityReport verify_identity(const TermList& t, const ShiftOperator& s1, const ShiftOperator& s2, int trials,
                               std::uint64_t seed, double tolerance = 1e-9);

/// Largest ||[h_I^e, S] h_I^e'|| over all cubes I and cancellative e != e'.
/// For the synthesis orientation the transposed commutator is used, which is
/// -[h_I^e, S^*].
double same_cube_residual(const ShiftOperator& s);

std::string case_label(const ShiftOperator& s);
std::string to_json_line(const IdentityReport& r);

}  // namespace dyadic
