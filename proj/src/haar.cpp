#include "dyadic/haar.hpp"

#include <cmath>

namespace dyadic {

HaarCoefficients::HaarCoefficients(Grid grid)
    : grid_(std::move(grid)), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_.size()))) {}

HaarCoefficients::HaarCoefficients(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size())
    throw std::invalid_argument("coefficient vector length does not match the grid");
}

double HaarCoefficients::operator[](HaarIndex h) const {
  return values_[static_cast<Eigen::Index>(coefficient_slot(grid_, h))];
}

double& HaarCoefficients::operator[](HaarIndex h) {
  return values_[static_cast<Eigen::Index>(coefficient_slot(grid_, h))];
}

std::size_t coefficient_slot(const Grid& grid, HaarIndex h) {
  grid.check(h);
  if (!grid.is_cancellative(h.sig)) {
    if (h.cube.level == 0) return 0;
    throw InvalidIndex("only the root noncancellative coefficient is stored");
  }
  return grid.cubes_at(h.cube.level) + h.cube.index * grid.cancellative_count() + h.sig;
}

HaarIndex haar_index_at(const Grid& grid, std::size_t slot) {
  if (slot == 0) return {{0, 0}, grid.noncancellative()};
  if (slot >= grid.size()) throw InvalidIndex("coefficient slot out of range");
  int level = 0;
  while (grid.cubes_at(level + 1) <= slot) ++level;
  const std::size_t rel = slot - grid.cubes_at(level);
  const unsigned m = grid.cancellative_count();
  return {{level, rel / m}, static_cast<Signature>(rel % m)};
}

DyadicFunction haar_function(const Grid& grid, HaarIndex idx) {
  grid.check(idx);
  DyadicFunction out(grid);
  const double scale = 1.0 / std::sqrt(grid.volume(idx.cube));
  for (std::size_t cell : grid.cells(idx.cube)) {
    if (idx.cube.level == grid.depth()) {
      out.samples()[static_cast<Eigen::Index>(cell)] = scale;
      continue;
    }
    // Side of the cell on each axis relative to the cube's two halves.
    const Cube half = grid.cube_of_cell(cell, idx.cube.level + 1);
    const unsigned slot = grid.slot_in_parent(half);
    double v = scale;
    for (int a = 0; a < grid.dim(); ++a) {
      const unsigned bit = 1u << (grid.dim() - 1 - a);
      if ((idx.sig & bit) == 0 && (slot & bit) != 0) v = -v;
    }
    out.samples()[static_cast<Eigen::Index>(cell)] = v;
  }
  return out;
}

CubeAverages zero_averages(const Grid& grid) {
  CubeAverages out(grid.depth() + 1);
  for (int k = 0; k <= grid.depth(); ++k)
    out[k] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.cubes_at(k)));
  return out;
}

Eigen::VectorXd analyze(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& samples,
                        CubeAverages* averages) {
  const int n = grid.depth();
  const unsigned fan = grid.fanout();
  const unsigned mask = grid.noncancellative();
  const unsigned m = grid.cancellative_count();
  const double h = std::sqrt(std::ldexp(1.0, -grid.dim()));

  if (static_cast<std::size_t>(samples.size()) != grid.size())
    throw std::invalid_argument("analyze: sample vector length does not match the grid");

  Eigen::VectorXd coeffs(samples.size());
  Eigen::VectorXd level = samples * std::sqrt(grid.volume(n));
  if (averages) {
    averages->assign(n + 1, Eigen::VectorXd());
    (*averages)[n] = level;
  }
  std::vector<double> ch(fan);
  for (int k = n - 1; k >= 0; --k) {
    const std::size_t count = grid.cubes_at(k);
    Eigen::VectorXd up(static_cast<Eigen::Index>(count));
    for (std::size_t q = 0; q < count; ++q) {
      for (unsigned c = 0; c < fan; ++c)
        ch[c] = level[static_cast<Eigen::Index>(grid.child({k, q}, c).index)];
      for (unsigned eps = 0; eps < fan; ++eps) {
        double v = 0.0;
        for (unsigned c = 0; c < fan; ++c) v += walsh_sign(eps, c, mask) * ch[c];
        v *= h;
        if (eps == mask)
          up[static_cast<Eigen::Index>(q)] = v;
        else
          coeffs[static_cast<Eigen::Index>(count + q * m + eps)] = v;
      }
    }
    level.swap(up);
    if (averages) (*averages)[k] = level;
  }
  coeffs[0] = level[0];
  return coeffs;
}

Eigen::VectorXd synthesize(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                           const CubeAverages* extra) {
  const int n = grid.depth();
  const unsigned fan = grid.fanout();
  const unsigned mask = grid.noncancellative();
  const unsigned m = grid.cancellative_count();
  const double h = std::sqrt(std::ldexp(1.0, -grid.dim()));

  if (static_cast<std::size_t>(coeffs.size()) != grid.size())
    throw std::invalid_argument("synthesize: coefficient vector length does not match the grid");

  Eigen::VectorXd level(1);
  level[0] = coeffs[0] + (extra ? (*extra)[0][0] : 0.0);
  for (int k = 0; k < n; ++k) {
    const std::size_t count = grid.cubes_at(k);
    Eigen::VectorXd down = extra ? (*extra)[k + 1]
                                 : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.cubes_at(k + 1)));
    for (std::size_t q = 0; q < count; ++q) {
      const double avg = level[static_cast<Eigen::Index>(q)];
      const Eigen::Index base = static_cast<Eigen::Index>(count + q * m);
      for (unsigned c = 0; c < fan; ++c) {
        double v = avg;
        for (unsigned eps = 0; eps < mask; ++eps) v += walsh_sign(eps, c, mask) * coeffs[base + eps];
        down[static_cast<Eigen::Index>(grid.child({k, q}, c).index)] += h * v;
      }
    }
    level.swap(down);
  }
  return level / std::sqrt(grid.volume(n));
}

HaarCoefficients haar_forward(const DyadicFunction& f) {
  return {f.grid(), analyze(f.grid(), f.samples())};
}

DyadicFunction haar_inverse(const HaarCoefficients& c) {
  return {c.grid(), synthesize(c.grid(), c.values())};
}

CubeAverages cube_averages(const DyadicFunction& f) {
  CubeAverages out;
  analyze(f.grid(), f.samples(), &out);
  return out;
}

Eigen::VectorXd signature_sums(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.total_cubes()));
  const Eigen::Index m = g.cancellative_count();
  for (int k = 0; k < g.depth(); ++k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q)
      w[static_cast<Eigen::Index>(g.flat({k, q}))] =
          coeffs.segment(static_cast<Eigen::Index>(g.cubes_at(k) + q * m), m).sum();
  return w;
}

Eigen::VectorXd spread_signatures(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& per_cube) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  const Eigen::Index m = g.cancellative_count();
  for (int k = 0; k < g.depth(); ++k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q)
      out.segment(static_cast<Eigen::Index>(g.cubes_at(k) + q * m), m)
          .setConstant(per_cube[static_cast<Eigen::Index>(g.flat({k, q}))]);
  return out;
}

Eigen::VectorXd strict_ancestor_sums(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& w) {
  Eigen::VectorXd above = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.total_cubes()));
  for (int k = 0; k < g.depth(); ++k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q) {
      const auto f = static_cast<Eigen::Index>(g.flat({k, q}));
      const double s = above[f] + w[f];
      for (unsigned c = 0; c < g.fanout(); ++c)
        above[static_cast<Eigen::Index>(g.flat(g.child({k, q}, c)))] = s;
    }
  return above;
}

Eigen::VectorXd strict_descendant_sums(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& t) {
  Eigen::VectorXd below = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.total_cubes()));
  for (int k = g.depth() - 1; k >= 0; --k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q) {
      double s = 0.0;
      for (unsigned c = 0; c < g.fanout(); ++c) {
        const auto ch = static_cast<Eigen::Index>(g.flat(g.child({k, q}, c)));
        s += below[ch] + t[ch];
      }
      below[static_cast<Eigen::Index>(g.flat({k, q}))] = s;
    }
  return below;
}

double HaarView::pairing(const Grid& grid, HaarIndex h) const {
  if (grid.is_cancellative(h.sig)) return coeffs[static_cast<Eigen::Index>(coefficient_slot(grid, h))];
  return averages[h.cube.level][static_cast<Eigen::Index>(h.cube.index)];
}

HaarView haar_view(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& samples) {
  HaarView v;
  v.coeffs = analyze(grid, samples, &v.averages);
  return v;
}

HaarAccumulator::HaarAccumulator(const Grid& grid)
    : grid_(grid),
      coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))),
      extra_(zero_averages(grid)) {}

void HaarAccumulator::add(HaarIndex h, double c) {
  if (grid_.is_cancellative(h.sig))
    coeffs_[static_cast<Eigen::Index>(coefficient_slot(grid_, h))] += c;
  else
    extra_[h.cube.level][static_cast<Eigen::Index>(h.cube.index)] += c;
}

Eigen::VectorXd HaarAccumulator::samples() const { return synthesize(grid_, coeffs_, &extra_); }

}  // namespace dyadic
