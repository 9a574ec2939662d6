#pragma once

// Brute-force references. Everything here is written directly from the
// defining sums over sampled Haar functions and never touches the fast
// tree transforms, so agreement with the library is meaningful.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dyadic/haar.hpp"
#include "dyadic/product.hpp"
#include "dyadic/random.hpp"
#include "dyadic/shift.hpp"

namespace oracle {

using namespace dyadic;

struct Basis {
  std::vector<HaarIndex> index;
  std::vector<Eigen::VectorXd> samples;
};

/// Every cancellative Haar function of the grid (levels 0..N-1).
inline Basis cancellative_basis(const Grid& g) {
  Basis b;
  for (int k = 0; k < g.depth(); ++k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q)
      for (Signature s = 0; s < g.cancellative_count(); ++s) {
        b.index.push_back({{k, q}, s});
        b.samples.push_back(haar_function(g, {{k, q}, s}).samples());
      }
  return b;
}

inline double pair(const Grid& g, const Eigen::VectorXd& f, const Eigen::VectorXd& h) {
  return f.dot(h) / static_cast<double>(g.size());
}

inline Eigen::VectorXd haar(const Grid& g, HaarIndex h) { return haar_function(g, h).samples(); }

/// Strict containment by cell sets.
inline bool strictly_inside(const Grid& g, Cube inner, Cube outer) {
  if (inner.level <= outer.level) return false;
  const auto in = g.cells(inner);
  const auto out = g.cells(outer);
  for (std::size_t c : in)
    if (std::find(out.begin(), out.end(), c) == out.end()) return false;
  return true;
}

/// k-th ancestor found by cell containment.
inline Cube ancestor_by_cells(const Grid& g, Cube I, int k) {
  const std::size_t cell = g.cells(I).front();
  for (std::size_t q = 0; q < g.cubes_at(I.level - k); ++q) {
    const auto c = g.cells({I.level - k, q});
    if (std::find(c.begin(), c.end(), cell) != c.end()) return {I.level - k, q};
  }
  throw std::logic_error("no ancestor");
}

/// beta_I from the pointwise product of sampled Haar functions.
inline double sampled_beta(const Grid& g, Cube I, int k, Signature sig_b) {
  if (k == 0) return 1.0;
  const Cube top = ancestor_by_cells(g, I, k);
  const Eigen::VectorXd h = haar(g, {top, sig_b});
  return h[static_cast<Eigen::Index>(g.cells(I).front())] * std::sqrt(g.volume(top));
}

inline Eigen::VectorXd shift(const ShiftOperator& s, const Eigen::VectorXd& f) {
  const Grid& g = s.grid();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (const ShiftEntry& e : s.entries()) out += e.a * pair(g, f, haar(g, e.I)) * haar(g, e.J);
  return out;
}

inline Eigen::VectorXd Bk(const Grid& g, int k, Signature sb, Signature si, Signature so,
                          const Eigen::VectorXd& b, const Eigen::VectorXd& f) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (int lvl = k; lvl < g.depth(); ++lvl)
    for (std::size_t q = 0; q < g.cubes_at(lvl); ++q) {
      const Cube I{lvl, q};
      const Cube top = ancestor_by_cells(g, I, k);
      const double beta = sampled_beta(g, I, k, sb);
      out += beta * pair(g, b, haar(g, {top, sb})) * pair(g, f, haar(g, {I, si})) * haar(g, {I, so}) /
             std::sqrt(g.volume(top));
    }
  return out;
}

inline Eigen::VectorXd P(const Grid& g, const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& f) {
  const Basis basis = cancellative_basis(g);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (std::size_t x = 0; x < basis.index.size(); ++x) {
    const Cube I = basis.index[x].cube;
    const double w = pair(g, b, basis.samples[x]) * pair(g, f, basis.samples[x]) / g.volume(I);
    for (std::size_t y = 0; y < basis.index.size(); ++y)
      if (strictly_inside(g, basis.index[y].cube, I)) out += w * pair(g, a, basis.samples[y]) * basis.samples[y];
  }
  return out;
}

inline Eigen::VectorXd P_adjoint(const Grid& g, const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& f) {
  const Basis basis = cancellative_basis(g);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (std::size_t x = 0; x < basis.index.size(); ++x) {
    const Cube I = basis.index[x].cube;
    double inner = 0.0;
    for (std::size_t y = 0; y < basis.index.size(); ++y)
      if (strictly_inside(g, basis.index[y].cube, I))
        inner += pair(g, a, basis.samples[y]) * pair(g, f, basis.samples[y]);
    out += pair(g, b, basis.samples[x]) / g.volume(I) * inner * basis.samples[x];
  }
  return out;
}

/// Dense matrix of any sample-vector map.
template <class Map>
Eigen::MatrixXd dense(Eigen::Index n, Map&& fn) {
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index c = 0; c < n; ++c) m.col(c) = fn(Eigen::VectorXd::Unit(n, c));
  return m;
}

/// Top singular value by repeated squaring of A^T A (no SVD).
inline double top_singular_value(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd ata = a.transpose() * a;
  if (ata.norm() == 0.0) return 0.0;
  Eigen::MatrixXd p = ata / ata.norm();
  for (int t = 0; t < 60; ++t) {
    p = p * p;
    p /= p.norm();
  }
  return std::sqrt((ata * p).trace() / p.trace());
}

// ---- bi-parameter ----

inline Eigen::MatrixXd rect_haar(const ProductGrid& g, HaarIndex h1, HaarIndex h2) {
  return haar(g.first, h1) * haar(g.second, h2).transpose();
}

inline double pair2(const Eigen::MatrixXd& f, const Eigen::MatrixXd& h) {
  return f.cwiseProduct(h).sum() / static_cast<double>(f.size());
}

/// B_k (x) B_l with cancellative signatures sb/si/so per variable.
struct BkSpec {
  int k;
  Signature sb, si, so;
};

inline Eigen::MatrixXd Bkl(const ProductGrid& g, BkSpec s1, BkSpec s2, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& f) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
  for (int l1 = s1.k; l1 < g.first.depth(); ++l1)
    for (std::size_t q1 = 0; q1 < g.first.cubes_at(l1); ++q1)
      for (int l2 = s2.k; l2 < g.second.depth(); ++l2)
        for (std::size_t q2 = 0; q2 < g.second.cubes_at(l2); ++q2) {
          const Cube I1{l1, q1}, I2{l2, q2};
          const Cube T1 = ancestor_by_cells(g.first, I1, s1.k), T2 = ancestor_by_cells(g.second, I2, s2.k);
          const double beta = sampled_beta(g.first, I1, s1.k, s1.sb) * sampled_beta(g.second, I2, s2.k, s2.sb);
          out += beta * pair2(b, rect_haar(g, {T1, s1.sb}, {T2, s2.sb})) * pair2(f, rect_haar(g, {I1, s1.si}, {I2, s2.si})) *
                 rect_haar(g, {I1, s1.so}, {I2, s2.so}) / std::sqrt(g.first.volume(T1) * g.second.volume(T2));
        }
  return out;
}

/// PP with a general product symbol a.
inline Eigen::MatrixXd PP(const ProductGrid& g, const Eigen::MatrixXd& b, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& f) {
  const Basis u = cancellative_basis(g.first), v = cancellative_basis(g.second);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
  for (std::size_t x1 = 0; x1 < u.index.size(); ++x1)
    for (std::size_t x2 = 0; x2 < v.index.size(); ++x2) {
      const Eigen::MatrixXd hI = u.samples[x1] * v.samples[x2].transpose();
      const double w = pair2(b, hI) * pair2(f, hI) / (g.first.volume(u.index[x1].cube) * g.second.volume(v.index[x2].cube));
      if (w == 0.0) continue;
      for (std::size_t y1 = 0; y1 < u.index.size(); ++y1) {
        if (!strictly_inside(g.first, u.index[y1].cube, u.index[x1].cube)) continue;
        for (std::size_t y2 = 0; y2 < v.index.size(); ++y2) {
          if (!strictly_inside(g.second, v.index[y2].cube, v.index[x2].cube)) continue;
          const Eigen::MatrixXd hJ = u.samples[y1] * v.samples[y2].transpose();
          out += w * pair2(a, hJ) * hJ;
        }
      }
    }
  return out;
}

/// PP1: sum b_I |I1|^-1 |I2|^-1 sum_{J strictly inside} a_J <f, h_J1 x u_I2> h_I1 x u_J2.
inline Eigen::MatrixXd PP1(const ProductGrid& g, const Eigen::MatrixXd& b, const Eigen::MatrixXd& a,
                           const Eigen::MatrixXd& f) {
  const Basis u = cancellative_basis(g.first), v = cancellative_basis(g.second);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
  for (std::size_t x1 = 0; x1 < u.index.size(); ++x1)
    for (std::size_t x2 = 0; x2 < v.index.size(); ++x2) {
      const Eigen::MatrixXd hI = u.samples[x1] * v.samples[x2].transpose();
      const double w = pair2(b, hI) / (g.first.volume(u.index[x1].cube) * g.second.volume(v.index[x2].cube));
      for (std::size_t y1 = 0; y1 < u.index.size(); ++y1) {
        if (!strictly_inside(g.first, u.index[y1].cube, u.index[x1].cube)) continue;
        const double fj = pair2(f, u.samples[y1] * v.samples[x2].transpose());
        for (std::size_t y2 = 0; y2 < v.index.size(); ++y2) {
          if (!strictly_inside(g.second, v.index[y2].cube, v.index[x2].cube)) continue;
          out += w * pair2(a, u.samples[y1] * v.samples[y2].transpose()) * fj *
                 (u.samples[x1] * v.samples[y2].transpose());
        }
      }
    }
  return out;
}

/// BP_k: B_k in variable 1, P with symbol a2 in variable 2.
inline Eigen::MatrixXd BPk(const ProductGrid& g, BkSpec s1, const Eigen::VectorXd& a2, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& f) {
  const Basis v = cancellative_basis(g.second);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
  for (int l1 = s1.k; l1 < g.first.depth(); ++l1)
    for (std::size_t q1 = 0; q1 < g.first.cubes_at(l1); ++q1) {
      const Cube I1{l1, q1};
      const Cube T1 = ancestor_by_cells(g.first, I1, s1.k);
      const double beta = sampled_beta(g.first, I1, s1.k, s1.sb);
      for (std::size_t x2 = 0; x2 < v.index.size(); ++x2) {
        const Cube I2 = v.index[x2].cube;
        const double w = beta * pair2(b, haar(g.first, {T1, s1.sb}) * v.samples[x2].transpose()) *
                         pair2(f, haar(g.first, {I1, s1.si}) * v.samples[x2].transpose()) /
                         (std::sqrt(g.first.volume(T1)) * g.second.volume(I2));
        Eigen::VectorXd tail = Eigen::VectorXd::Zero(v.samples[0].size());
        for (std::size_t y2 = 0; y2 < v.index.size(); ++y2)
          if (strictly_inside(g.second, v.index[y2].cube, I2)) tail += pair(g.second, a2, v.samples[y2]) * v.samples[y2];
        out += w * haar(g.first, {I1, s1.so}) * tail.transpose();
      }
    }
  return out;
}

/// PB_l: P with symbol a1 in variable 1, B_l in variable 2.
inline Eigen::MatrixXd PBl(const ProductGrid& g, const Eigen::VectorXd& a1, BkSpec s2, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& f) {
  const ProductGrid swapped{g.second, g.first};
  return BPk(swapped, s2, a1, b.transpose(), f.transpose()).transpose();
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline double rel(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = std::max(want.norm(), 1.0);
  return (got - want).norm() / scale;
}

}  // namespace oracle
