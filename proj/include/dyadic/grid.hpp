#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadic {

/// Raised for cubes or Haar indices that do not exist on a grid.
class InvalidIndex : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Raised when two objects living on different grids are combined.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dyadic grid on the unit torus [0,1)^d truncated at depth N.
///
/// `omega`, when non-empty, holds the per-level offsets omega_1..omega_N
/// (each a 0/1 vector of length d). A cube of level k is translated by
/// sum_{j>k} 2^{-j} omega_j, which keeps every cube aligned with the
/// finest cells and wraps around the torus.
struct GridSpec {
  int dim = 1;
  int depth = 1;
  std::vector<std::vector<int>> omega;

  static constexpr std::size_t kMaxCells = std::size_t{1} << 24;

  void validate() const;
  std::size_t cells_per_axis() const { return std::size_t{1} << depth; }
  std::size_t size() const { return std::size_t{1} << (depth * dim); }
  bool shifted() const { return !omega.empty(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// A cube identified by its level and its flat position index.
/// Position coordinates are packed row-major with axis 1 slowest.
struct Cube {
  int level = 0;
  std::size_t index = 0;

  friend bool operator==(const Cube&, const Cube&) = default;
};

/// Signatures are bit masks: bit (d-1-a) holds epsilon_a for axis a.
/// The all-ones mask is the noncancellative signature.
using Signature = unsigned;

struct HaarIndex {
  Cube cube;
  Signature sig = 0;

  friend bool operator==(const HaarIndex&, const HaarIndex&) = default;
};

namespace detail {
struct Topology;
}

/// Immutable, cheaply copyable handle to a grid and its precomputed
/// parent/child tables.
class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const;
  int dim() const { return spec().dim; }
  int depth() const { return spec().depth; }
  std::size_t size() const { return spec().size(); }

  /// Number of children per cube, 2^d.
  unsigned fanout() const { return 1u << dim(); }
  /// All-ones signature.
  Signature noncancellative() const { return fanout() - 1; }
  /// Number of cancellative signatures per cube, 2^d - 1.
  unsigned cancellative_count() const { return fanout() - 1; }
  bool is_cancellative(Signature s) const { return s < noncancellative(); }

  std::size_t cubes_at(int level) const { return std::size_t{1} << (level * dim()); }
  /// Offset of `level` in the flat enumeration of all cubes of levels 0..N.
  std::size_t cube_offset(int level) const;
  std::size_t flat(Cube c) const { return cube_offset(c.level) + c.index; }
  std::size_t total_cubes() const { return cube_offset(depth() + 1); }

  /// Volume |I| = 2^{-level d}.
  double volume(int level) const;
  double volume(Cube c) const { return volume(c.level); }

  Cube child(Cube c, unsigned slot) const;
  Cube parent(Cube c) const;
  /// Which child of its parent `c` is (bit (d-1-a) = upper half on axis a).
  unsigned slot_in_parent(Cube c) const;
  /// k-th dyadic ancestor; throws std::out_of_range past the root.
  Cube ancestor(Cube c, int k) const;
  bool contains(Cube outer, Cube inner) const;
  /// All descendants exactly `levels` below `c`.
  std::vector<Cube> descendants(Cube c, int levels) const;

  /// Finest cells (flat sample indices) covered by the cube.
  std::vector<std::size_t> cells(Cube c) const;
  /// The level-`level` cube containing a finest cell.
  Cube cube_of_cell(std::size_t cell, int level) const;

  /// Value of h_A^sig on a strict descendant D (Haar functions are
  /// constant on children). Requires D strictly inside A.
  double haar_value_on(HaarIndex a, Cube d) const;

  std::vector<int> position(Cube c) const;
  Cube cube_at(int level, const std::vector<int>& pos) const;
  void check(Cube c) const;
  void check(HaarIndex h) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.spec() == b.spec(); }

 private:
  std::shared_ptr<const detail::Topology> topo_;
};

/// Throws GridMismatch unless both grids agree.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// The Walsh sign sigma(eps, c) = prod over cancellative axes of (+1 on the
/// lower child, -1 on the upper child).
inline double walsh_sign(Signature eps, unsigned slot, unsigned mask) {
  return (__builtin_popcount(~eps & slot & mask) & 1) ? -1.0 : 1.0;
}

/// Signature of the Haar function appearing in h_I^a * h_I^b = |I|^{-1/2} h_I^c.
inline Signature product_signature(Signature a, Signature b, unsigned mask) {
  return ~(a ^ b) & mask;
}

}  // namespace dyadic
