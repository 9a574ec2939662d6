#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dyadic/function.hpp"

namespace dyadic {

/// Raised when (i, j) do not fit below the grid root.
class DepthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ShiftKind { cancellative, noncancellative };

/// Which side of a noncancellative shift carries h_I^1.
/// analysis:  S f = sum_I a_I <f, h_I^1> h_I
/// synthesis: S f = sum_I a_I <f, h_I> h_I^1
enum class Orientation { analysis, synthesis };

/// One coefficient a_{IJK}: the shift sends <f, h_I> to a_{IJK} h_J.
struct ShiftEntry {
  Cube K;
  HaarIndex I;
  HaarIndex J;
  double a = 0.0;
};

/// S^{ij} f = sum_K sum_{I^{(i)} = K} sum_{J^{(j)} = K} a_{IJK} <f, h_I> h_J.
///
/// The noncancellative kind is the i = j = 0 paraproduct built from a
/// symbol b with a_I = <a, h_I> |I|^{-1/2}; its entries are materialised
/// with K = I = J and the noncancellative signature on one side.
class ShiftOperator {
 public:
  ShiftOperator(Grid grid, int i, int j, std::vector<ShiftEntry> entries);

  static ShiftOperator from_symbol(const DyadicFunction& symbol, Orientation orientation,
                                   double normalization = 1.0);

  const Grid& grid() const { return grid_; }
  int i() const { return i_; }
  int j() const { return j_; }
  ShiftKind kind() const { return kind_; }
  Orientation orientation() const { return orientation_; }
  const std::vector<ShiftEntry>& entries() const { return entries_; }
  /// Symbol of a noncancellative shift (already normalised).
  const std::optional<DyadicFunction>& symbol() const { return symbol_; }
  /// Factor the raw symbol was multiplied by to reach unit BMO norm.
  double normalization() const { return normalization_; }

  /// max_entries |a_{IJK}| |K| / (|I|^{1/2} |J|^{1/2}).
  double max_normalized_coefficient() const;
  /// max_K of the Frobenius norm of the coefficient block (a_{IJK})_{I,J}.
  /// Blocks act on disjoint Haar sets, so this bounds the operator norm.
  double max_block_frobenius() const;

 private:
  Grid grid_;
  int i_ = 0;
  int j_ = 0;
  ShiftKind kind_ = ShiftKind::cancellative;
  Orientation orientation_ = Orientation::analysis;
  std::vector<ShiftEntry> entries_;
  std::optional<DyadicFunction> symbol_;
  double normalization_ = 1.0;
};

/// Number of coefficients of a full cancellative S^{ij} on `grid`.
std::size_t shift_entry_count(const Grid& grid, int i, int j);

/// Uniform draws on the admissible interval. Cancellative blocks whose
/// Frobenius norm would exceed 1 (possible for d > 1) are rescaled to 1.
ShiftOperator random_shift(const Grid& grid, int i, int j, std::uint64_t seed,
                           ShiftKind kind = ShiftKind::cancellative,
                           Orientation orientation = Orientation::analysis);

DyadicFunction apply_shift(const ShiftOperator& s, const DyadicFunction& f);
/// Sample-vector kernel of apply_shift.
Eigen::VectorXd apply_shift(const ShiftOperator& s, const Eigen::Ref<const Eigen::VectorXd>& samples);

ShiftOperator adjoint(const ShiftOperator& s);

}  // namespace dyadic
