#include "dyadic/grid.hpp"

#include <cmath>
#include <sstream>

namespace dyadic {

namespace detail {

struct Topology {
  GridSpec spec;
  std::vector<std::size_t> offsets;                 // cube_offset per level, N+2 entries
  std::vector<std::vector<std::size_t>> children;   // [level][index * fanout + slot]
  std::vector<std::vector<std::size_t>> parents;    // [level][index], level >= 1
  std::vector<std::vector<unsigned>> slots;         // [level][index], level >= 1

  explicit Topology(GridSpec s) : spec(std::move(s)) {
    spec.validate();
    const int d = spec.dim;
    const int n = spec.depth;
    const unsigned fan = 1u << d;

    offsets.resize(n + 2);
    offsets[0] = 0;
    for (int k = 0; k <= n; ++k) offsets[k + 1] = offsets[k] + (std::size_t{1} << (k * d));

    auto omega = [&](int level, int axis) -> std::size_t {
      return spec.omega.empty() ? 0 : static_cast<std::size_t>(spec.omega[level - 1][axis]);
    };

    children.resize(n);
    parents.resize(n + 1);
    slots.resize(n + 1);
    for (int k = 0; k < n; ++k) {
      const std::size_t count = std::size_t{1} << (k * d);
      const std::size_t side = std::size_t{1} << k;
      const std::size_t child_side = side << 1;
      children[k].resize(count * fan);
      parents[k + 1].resize(count * fan);
      slots[k + 1].resize(count * fan);
      std::vector<std::size_t> pos(d);
      for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t rem = idx;
        for (int a = d - 1; a >= 0; --a) {
          pos[a] = rem % side;
          rem /= side;
        }
        for (unsigned slot = 0; slot < fan; ++slot) {
          std::size_t flat = 0;
          for (int a = 0; a < d; ++a) {
            const std::size_t c = (slot >> (d - 1 - a)) & 1u;
            const std::size_t p = (2 * pos[a] + omega(k + 1, a) + c) % child_side;
            flat = flat * child_side + p;
          }
          children[k][idx * fan + slot] = flat;
          parents[k + 1][flat] = idx;
          slots[k + 1][flat] = slot;
        }
      }
    }
  }
};

}  // namespace detail

void GridSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
  if (depth < 1) throw std::invalid_argument("grid depth must be >= 1");
  if (dim * depth > 24 || size() > kMaxCells)
    throw std::invalid_argument("grid exceeds the sample budget of 2^24 cells");
  if (!omega.empty()) {
    if (static_cast<int>(omega.size()) != depth)
      throw std::invalid_argument("omega must carry exactly one offset per level");
    for (const auto& w : omega) {
      if (static_cast<int>(w.size()) != dim)
        throw std::invalid_argument("omega offset has wrong dimension");
      for (int v : w)
        if (v != 0 && v != 1) throw std::invalid_argument("omega offsets must be 0 or 1");
    }
  }
}

Grid::Grid(GridSpec spec) : topo_(std::make_shared<const detail::Topology>(std::move(spec))) {}

const GridSpec& Grid::spec() const { return topo_->spec; }

std::size_t Grid::cube_offset(int level) const { return topo_->offsets.at(level); }

double Grid::volume(int level) const { return std::ldexp(1.0, -level * dim()); }

void Grid::check(Cube c) const {
  if (c.level < 0 || c.level > depth() || c.index >= cubes_at(c.level)) {
    std::ostringstream os;
    os << "cube (level " << c.level << ", index " << c.index << ") outside grid of depth "
       << depth();
    throw InvalidIndex(os.str());
  }
}

void Grid::check(HaarIndex h) const {
  check(h.cube);
  if (h.sig > noncancellative()) throw InvalidIndex("Haar signature out of range");
  if (is_cancellative(h.sig) && h.cube.level >= depth())
    throw InvalidIndex("cancellative Haar functions need a cube above the finest level");
}

Cube Grid::child(Cube c, unsigned slot) const {
  if (c.level >= depth()) throw InvalidIndex("finest cubes have no children");
  return {c.level + 1, topo_->children[c.level][c.index * fanout() + slot]};
}

Cube Grid::parent(Cube c) const {
  if (c.level <= 0) throw std::out_of_range("the root cube has no parent");
  return {c.level - 1, topo_->parents[c.level][c.index]};
}

unsigned Grid::slot_in_parent(Cube c) const {
  if (c.level <= 0) throw std::out_of_range("the root cube has no parent");
  return topo_->slots[c.level][c.index];
}

Cube Grid::ancestor(Cube c, int k) const {
  if (k < 0 || k > c.level) throw std::out_of_range("ancestor beyond the root cube");
  for (int s = 0; s < k; ++s) c = {c.level - 1, topo_->parents[c.level][c.index]};
  return c;
}

bool Grid::contains(Cube outer, Cube inner) const {
  if (inner.level < outer.level) return false;
  return ancestor(inner, inner.level - outer.level) == outer;
}

std::vector<Cube> Grid::descendants(Cube c, int levels) const {
  if (c.level + levels > depth()) throw InvalidIndex("descendants below the finest level");
  std::vector<Cube> cur{c};
  for (int s = 0; s < levels; ++s) {
    std::vector<Cube> next;
    next.reserve(cur.size() * fanout());
    for (const Cube& q : cur)
      for (unsigned slot = 0; slot < fanout(); ++slot) next.push_back(child(q, slot));
    cur.swap(next);
  }
  return cur;
}

std::vector<std::size_t> Grid::cells(Cube c) const {
  check(c);
  std::vector<std::size_t> out;
  for (const Cube& leaf : descendants(c, depth() - c.level)) out.push_back(leaf.index);
  return out;
}

Cube Grid::cube_of_cell(std::size_t cell, int level) const {
  return ancestor({depth(), cell}, depth() - level);
}

double Grid::haar_value_on(HaarIndex a, Cube d) const {
  if (d.level <= a.cube.level) throw InvalidIndex("haar_value_on needs a strict descendant");
  const Cube top = ancestor(d, d.level - a.cube.level - 1);
  if (parent(top) != a.cube) throw InvalidIndex("cube is not inside the Haar support");
  const unsigned slot = slot_in_parent(top);
  return walsh_sign(a.sig, slot, noncancellative()) / std::sqrt(volume(a.cube));
}

std::vector<int> Grid::position(Cube c) const {
  check(c);
  const std::size_t side = std::size_t{1} << c.level;
  std::vector<int> pos(dim());
  std::size_t rem = c.index;
  for (int a = dim() - 1; a >= 0; --a) {
    pos[a] = static_cast<int>(rem % side);
    rem /= side;
  }
  return pos;
}

Cube Grid::cube_at(int level, const std::vector<int>& pos) const {
  if (level < 0 || level > depth() || static_cast<int>(pos.size()) != dim())
    throw InvalidIndex("cube position has wrong level or dimension");
  const std::size_t side = std::size_t{1} << level;
  std::size_t flat = 0;
  for (int p : pos) {
    if (p < 0 || static_cast<std::size_t>(p) >= side) throw InvalidIndex("cube position out of range");
    flat = flat * side + static_cast<std::size_t>(p);
  }
  return {level, flat};
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": operands live on different grids");
}

}  // namespace dyadic
