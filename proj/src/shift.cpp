#include "dyadic/shift.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dyadic/haar.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

constexpr double kSlack = 1e-12;

double entry_bound(const Grid& g, const ShiftEntry& e) {
  return std::sqrt(g.volume(e.I.cube) * g.volume(e.J.cube)) / g.volume(e.K);
}

}  // namespace

ShiftOperator::ShiftOperator(Grid grid, int i, int j, std::vector<ShiftEntry> entries)
    : grid_(std::move(grid)), i_(i), j_(j), entries_(std::move(entries)) {
  if (i < 0 || j < 0) throw DepthError("shift parameters must be nonnegative");
  if (std::max(i, j) >= grid_.depth()) throw DepthError("shift reaches below the finest level");
  bool has_analysis = false;
  bool has_synthesis = false;
  for (const ShiftEntry& e : entries_) {
    grid_.check(e.K);
    grid_.check(e.I);
    grid_.check(e.J);
    if (e.I.cube.level != e.K.level + i || grid_.ancestor(e.I.cube, i) != e.K ||
        e.J.cube.level != e.K.level + j || grid_.ancestor(e.J.cube, j) != e.K)
      throw InvalidIndex("shift entry cubes are not i, j levels below K");
    if (std::abs(e.a) > entry_bound(grid_, e) * (1.0 + kSlack))
      throw std::invalid_argument("shift coefficient exceeds |I|^{1/2}|J|^{1/2}/|K|");
    const bool nc_in = !grid_.is_cancellative(e.I.sig);
    const bool nc_out = !grid_.is_cancellative(e.J.sig);
    if (nc_in && nc_out) throw std::invalid_argument("both sides of a shift entry are noncancellative");
    has_analysis |= nc_in;
    has_synthesis |= nc_out;
  }
  if (has_analysis && has_synthesis)
    throw std::invalid_argument("noncancellative shift mixes both orientations");
  if (has_analysis || has_synthesis) {
    if (i != 0 || j != 0) throw std::invalid_argument("noncancellative shifts require i = j = 0");
    kind_ = ShiftKind::noncancellative;
    orientation_ = has_analysis ? Orientation::analysis : Orientation::synthesis;
  } else if (max_block_frobenius() > 1.0 + kSlack) {
    throw std::invalid_argument("shift block exceeds unit Frobenius norm");
  }
}

ShiftOperator ShiftOperator::from_symbol(const DyadicFunction& symbol, Orientation orientation,
                                         double normalization) {
  const Grid& g = symbol.grid();
  if (dyadic_bmo_norm(symbol) > 1.0 + 1e-9) throw std::invalid_argument("shift symbol has BMO norm above 1");
  const Eigen::VectorXd c = analyze(g, symbol.samples());
  std::vector<ShiftEntry> entries;
  for (std::size_t s = 1; s < g.size(); ++s) {
    const HaarIndex h = haar_index_at(g, s);
    const HaarIndex one{h.cube, g.noncancellative()};
    const double a = c[static_cast<Eigen::Index>(s)] / std::sqrt(g.volume(h.cube));
    if (orientation == Orientation::analysis)
      entries.push_back({h.cube, one, h, a});
    else
      entries.push_back({h.cube, h, one, a});
  }
  ShiftOperator out(g, 0, 0, std::move(entries));
  out.kind_ = ShiftKind::noncancellative;
  out.orientation_ = orientation;
  out.symbol_ = symbol;
  out.normalization_ = normalization;
  return out;
}

double ShiftOperator::max_normalized_coefficient() const {
  double m = 0.0;
  for (const ShiftEntry& e : entries_) m = std::max(m, std::abs(e.a) / entry_bound(grid_, e));
  return m;
}

double ShiftOperator::max_block_frobenius() const {
  std::unordered_map<std::size_t, double> blocks;
  for (const ShiftEntry& e : entries_) {
    blocks[grid_.flat(e.K)] += e.a * e.a;
  }
  double m = 0.0;
  for (const auto& [k, v] : blocks) m = std::max(m, v);
  return std::sqrt(m);
}

std::size_t shift_entry_count(const Grid& grid, int i, int j) {
  const int top = grid.depth() - 1 - std::max(i, j);
  if (i < 0 || j < 0 || top < 0) throw DepthError("shift does not fit in the grid");
  const std::size_t m = grid.cancellative_count();
  std::size_t n = 0;
  for (int k = 0; k <= top; ++k) n += grid.cubes_at(k) * (grid.cubes_at(i) * m) * (grid.cubes_at(j) * m);
  return n;
}

ShiftOperator random_shift(const Grid& grid, int i, int j, std::uint64_t seed, ShiftKind kind,
                           Orientation orientation) {
  Rng rng(seed);
  if (kind == ShiftKind::noncancellative) {
    if (i != 0 || j != 0) throw std::invalid_argument("noncancellative shifts require i = j = 0");
    DyadicFunction a = random_function(grid, rng);
    const double bmo = dyadic_bmo_norm(a);
    const double scale = bmo > 0.0 ? 1.0 / bmo : 0.0;
    a *= scale;
    return ShiftOperator::from_symbol(a, orientation, scale);
  }

  const int top = grid.depth() - 1 - std::max(i, j);
  if (i < 0 || j < 0 || top < 0) throw DepthError("shift does not fit in the grid");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const unsigned m = grid.cancellative_count();
  std::vector<ShiftEntry> entries;
  entries.reserve(shift_entry_count(grid, i, j));
  for (int k = 0; k <= top; ++k) {
    const double bound = std::sqrt(grid.volume(k + i) * grid.volume(k + j)) / grid.volume(k);
    for (std::size_t q = 0; q < grid.cubes_at(k); ++q) {
      const Cube K{k, q};
      const std::size_t first = entries.size();
      double frob = 0.0;
      for (const Cube& I : grid.descendants(K, i))
        for (Signature si = 0; si < m; ++si)
          for (const Cube& J : grid.descendants(K, j))
            for (Signature sj = 0; sj < m; ++sj) {
              const double a = unit(rng) * bound;
              frob += a * a;
              entries.push_back({K, {I, si}, {J, sj}, a});
            }
      if (frob > 1.0) {
        const double r = 1.0 / std::sqrt(frob);
        for (std::size_t e = first; e < entries.size(); ++e) entries[e].a *= r;
      }
    }
  }
  return ShiftOperator(grid, i, j, std::move(entries));
}

Eigen::VectorXd apply_shift(const ShiftOperator& s, const Eigen::Ref<const Eigen::VectorXd>& samples) {
  const Grid& g = s.grid();
  const HaarView in = haar_view(g, samples);
  HaarAccumulator out(g);
  for (const ShiftEntry& e : s.entries()) out.add(e.J, e.a * in.pairing(g, e.I));
  return out.samples();
}

DyadicFunction apply_shift(const ShiftOperator& s, const DyadicFunction& f) {
  require_same_grid(s.grid(), f.grid(), "apply_shift");
  return {f.grid(), apply_shift(s, f.samples())};
}

ShiftOperator adjoint(const ShiftOperator& s) {
  std::vector<ShiftEntry> entries = s.entries();
  for (ShiftEntry& e : entries) std::swap(e.I, e.J);
  if (s.kind() == ShiftKind::noncancellative && s.symbol()) {
    const Orientation o =
        s.orientation() == Orientation::analysis ? Orientation::synthesis : Orientation::analysis;
    return ShiftOperator::from_symbol(*s.symbol(), o, s.normalization());
  }
  return ShiftOperator(s.grid(), s.j(), s.i(), std::move(entries));
}

}  // namespace dyadic
