#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyadic/function.hpp"
#include "dyadic/product.hpp"

namespace dyadic {

/// sup_I (|I|^{-1} sum_{J in I, cancellative} <b, h_J>^2)^{1/2}.
double dyadic_bmo_norm(const DyadicFunction& b);

/// Rectangle BMO: the same supremum over dyadic rectangles R0, summing
/// coefficients cancellative in both variables.
double rect_bmo_norm(const ProductFunction& b);

/// Product BMO over open sets, by exhaustive search over unions of finest
/// cells. Only feasible for tiny grids (at most 20 cells).
double open_set_bmo_norm(const ProductFunction& b);

/// S f = (sum_I |<f, h_I>|^2 chi_I / |I|)^{1/2}.
DyadicFunction square_function(const DyadicFunction& f);
/// S^{(k)} f = (sum_J sum_{I^{(k)} = J} |<f, h_I>|^2 chi_J / |J|)^{1/2}; 0 <= k < N.
DyadicFunction square_function(const DyadicFunction& f, int k);
/// Dyadic double square function over rectangles.
ProductFunction double_square_function(const ProductFunction& f);
/// Maximal in variable `var`, square in the other:
/// (sum_{I'} M_var(<f, h_{I'}>_other)^2 chi_{I'} / |I'|)^{1/2}.
ProductFunction hybrid_max_square(const ProductFunction& f, int var);

/// sup over dyadic cubes containing x of the average of |f|.
DyadicFunction dyadic_maximal(const DyadicFunction& f);
/// sup over dyadic rectangles containing x of the average of |f|.
ProductFunction strong_maximal(const ProductFunction& f);
/// (sum_j (M f_j)^2)^{1/2}.
DyadicFunction vector_maximal(const std::vector<DyadicFunction>& family);
/// ||(sum_j (M f_j)^2)^{1/2}||_p / ||(sum_j |f_j|^2)^{1/2}||_p.
double fs_check(const std::vector<DyadicFunction>& family, double p);

/// ||(sum_{J in I} <a, h_J>^2 chi_J / |J|)^{1/2}||_p / (||a||_BMO |I|^{1/p}); 0 when ||a||_BMO = 0.
double jn_check(const DyadicFunction& a, Cube I, double p);
/// Rectangle version with the rectangle BMO norm.
double jn_check(const ProductFunction& a, Cube I1, Cube I2, double p);

/// sum_{i,j=0}^{cap} 2^{-max(i,j) delta/2} (1 + max(i,j)).
double geometric_constant(double delta, int cap);
/// Limit of geometric_constant as cap -> infinity.
double geometric_constant_limit(double delta);
/// Rigorous bound on the omitted tail sum_{m > cap}.
double geometric_tail_bound(double delta, int cap);

struct NormReport {
  std::string kind;
  int k = 0;
  int l = 0;
  int i = 0;
  int j = 0;
  int trials = 0;
  double max_ratio = 0.0;
  std::uint64_t seed = 0;
};

struct StudyConfig {
  std::string kind = "Bk";  // Bk, Sk, P, Pstar, Bkl, BPk, PBl, PP, PP1
  int d = 1;
  int N = 8;
  int k_max = 4;
  int l_max = 0;  // bi-parameter kinds only
  int trials = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// One report per k (or per (k, l)). Ratios:
///   Bk    ||B_k(b,f)|| / (||b||_BMO ||f||), cancellative signatures
///   Sk    ||S^{(k)} f|| / ||f||
///   P     ||P(b,a,f)|| / (||b||_BMO ||a||_BMO ||f||), Pstar likewise
///   Bkl   ||B_{k,l}(b,f)|| / (||b||_rect ||f||)
///   BPk, PBl, PP, PP1 with the extra symbol factors ||a^i||_BMO.
std::vector<NormReport> uniformity_study(const StudyConfig& cfg);

std::string to_json_line(const NormReport& r);
std::string csv_header();
std::string to_csv_line(const NormReport& r);

}  // namespace dyadic
