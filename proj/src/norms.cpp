#include "dyadic/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "dyadic/haar.hpp"
#include "dyadic/paraproduct.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Per flat cube: sum over cancellative signatures of squared coefficients.
Eigen::VectorXd energy(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& samples) {
  const Eigen::VectorXd c = analyze(g, samples);
  return signature_sums(g, c.cwiseAbs2());
}

Eigen::VectorXd inclusive_descendant_sums(const Grid& g, const Eigen::VectorXd& e) {
  return e + strict_descendant_sums(g, e);
}

Eigen::VectorXd per_volume(const Grid& g, Eigen::VectorXd v) {
  for (int k = 0; k <= g.depth(); ++k)
    v.segment(idx(g.cube_offset(k)), idx(g.cubes_at(k))) /= g.volume(k);
  return v;
}

// Restriction of a flat-cube vector to the finest level, i.e. one value per cell.
Eigen::VectorXd finest(const Grid& g, const Eigen::VectorXd& v) {
  return v.segment(idx(g.cube_offset(g.depth())), idx(g.size()));
}

// Average of f over every cube, indexed by flat cube.
Eigen::VectorXd cube_means(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& samples) {
  CubeAverages avg;
  analyze(g, samples, &avg);
  Eigen::VectorXd out(idx(g.total_cubes()));
  for (int k = 0; k <= g.depth(); ++k)
    out.segment(idx(g.cube_offset(k)), idx(g.cubes_at(k))) = avg[k] / std::sqrt(g.volume(k));
  return out;
}

// Maximum over the ancestor chain, pushed down to the cells.
Eigen::VectorXd ancestor_max(const Grid& g, Eigen::VectorXd v) {
  for (int k = 0; k < g.depth(); ++k)
    for (std::size_t q = 0; q < g.cubes_at(k); ++q)
      for (unsigned c = 0; c < g.fanout(); ++c) {
        const auto ch = idx(g.flat(g.child({k, q}, c)));
        v[ch] = std::max(v[ch], v[idx(g.flat({k, q}))]);
      }
  return finest(g, v);
}

Eigen::MatrixXd energy2(const ProductFunction& f) {
  const ProductGrid& g = f.grid();
  Eigen::MatrixXd c = haar_forward(f);
  c.row(0).setZero();
  c.col(0).setZero();
  Eigen::MatrixXd e = map_variable(c.cwiseAbs2(), 1, [&](const Eigen::VectorXd& x) { return signature_sums(g.first, x); });
  return map_variable(e, 2, [&](const Eigen::VectorXd& x) { return signature_sums(g.second, x); });
}

double lp_of(const Eigen::VectorXd& v, double p, double weight) {
  return std::pow((v.array().abs().pow(p) * weight).sum(), 1.0 / p);
}

}  // namespace

double dyadic_bmo_norm(const DyadicFunction& b) {
  const Grid& g = b.grid();
  const Eigen::VectorXd t = per_volume(g, inclusive_descendant_sums(g, energy(g, b.samples())));
  return std::sqrt(std::max(0.0, t.maxCoeff()));
}

double rect_bmo_norm(const ProductFunction& b) {
  const ProductGrid& g = b.grid();
  Eigen::MatrixXd t = map_variable(energy2(b), 1, [&](const Eigen::VectorXd& x) {
    return per_volume(g.first, inclusive_descendant_sums(g.first, x));
  });
  t = map_variable(t, 2, [&](const Eigen::VectorXd& x) { return per_volume(g.second, inclusive_descendant_sums(g.second, x)); });
  return std::sqrt(std::max(0.0, t.maxCoeff()));
}

double open_set_bmo_norm(const ProductFunction& b) {
  const ProductGrid& g = b.grid();
  const std::size_t rows = g.first.size();
  const std::size_t cols = g.second.size();
  const std::size_t n = rows * cols;
  if (n > 20) throw std::invalid_argument("open_set_bmo_norm is exhaustive; at most 20 cells");
  const Eigen::MatrixXd e = energy2(b);
  struct Rect {
    std::uint32_t mask;
    double energy;
  };
  std::vector<Rect> rects;
  for (int k1 = 0; k1 < g.first.depth(); ++k1)
    for (std::size_t q1 = 0; q1 < g.first.cubes_at(k1); ++q1)
      for (int k2 = 0; k2 < g.second.depth(); ++k2)
        for (std::size_t q2 = 0; q2 < g.second.cubes_at(k2); ++q2) {
          std::uint32_t mask = 0;
          for (std::size_t r : g.first.cells({k1, q1}))
            for (std::size_t c : g.second.cells({k2, q2})) mask |= std::uint32_t{1} << (r * cols + c);
          rects.push_back({mask, e(idx(g.first.flat({k1, q1})), idx(g.second.flat({k2, q2})))});
        }
  double best = 0.0;
  for (std::uint32_t set = 1; set < (std::uint32_t{1} << n); ++set) {
    double s = 0.0;
    for (const Rect& r : rects)
      if ((r.mask & ~set) == 0) s += r.energy;
    best = std::max(best, s * static_cast<double>(n) / __builtin_popcount(set));
  }
  return std::sqrt(best);
}

DyadicFunction square_function(const DyadicFunction& f) {
  const Grid& g = f.grid();
  const Eigen::VectorXd s = finest(g, strict_ancestor_sums(g, per_volume(g, energy(g, f.samples()))));
  return {g, s.cwiseSqrt()};
}

DyadicFunction square_function(const DyadicFunction& f, int k) {
  const Grid& g = f.grid();
  if (k < 0 || k >= g.depth()) throw std::invalid_argument("S^(k) needs 0 <= k < N");
  const Eigen::VectorXd e = energy(g, f.samples());
  Eigen::VectorXd grouped = Eigen::VectorXd::Zero(e.size());
  for (int lvl = k; lvl < g.depth(); ++lvl)
    for (std::size_t q = 0; q < g.cubes_at(lvl); ++q) {
      const Cube top = g.ancestor({lvl, q}, k);
      grouped[idx(g.flat(top))] += e[idx(g.flat({lvl, q}))];
    }
  const Eigen::VectorXd s = finest(g, strict_ancestor_sums(g, per_volume(g, grouped)));
  return {g, s.cwiseSqrt()};
}

ProductFunction double_square_function(const ProductFunction& f) {
  const ProductGrid& g = f.grid();
  Eigen::MatrixXd t = map_variable(energy2(f), 1, [&](const Eigen::VectorXd& x) {
    return finest(g.first, strict_ancestor_sums(g.first, per_volume(g.first, x)));
  });
  t = map_variable(t, 2, [&](const Eigen::VectorXd& x) {
    return finest(g.second, strict_ancestor_sums(g.second, per_volume(g.second, x)));
  });
  return {g, t.cwiseSqrt()};
}

ProductFunction hybrid_max_square(const ProductFunction& f, int var) {
  if (var != 1 && var != 2) throw std::invalid_argument("variable must be 1 or 2");
  const ProductGrid& g = f.grid();
  const Grid gm = g[var];
  const Grid gs = g[var == 1 ? 2 : 1];
  // Work with the maximal variable along columns.
  const Eigen::MatrixXd m = var == 1 ? Eigen::MatrixXd(f.samples()) : Eigen::MatrixXd(f.samples().transpose());
  const Eigen::MatrixXd partial = map_variable(m, 2, [&](const Eigen::VectorXd& v) { return analyze(gs, v); });
  Eigen::MatrixXd maxed(partial.rows(), partial.cols());
  for (Eigen::Index c = 0; c < partial.cols(); ++c)
    maxed.col(c) = ancestor_max(gm, cube_means(gm, partial.col(c).cwiseAbs()));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  const unsigned sigs = gs.cancellative_count();
  for (std::size_t cell = 0; cell < gs.size(); ++cell)
    for (int k = 0; k < gs.depth(); ++k) {
      const Cube c = gs.cube_of_cell(cell, k);
      const std::size_t base = gs.cubes_at(k) + c.index * sigs;
      for (unsigned s = 0; s < sigs; ++s)
        out.col(idx(cell)) += maxed.col(idx(base + s)).cwiseAbs2() / gs.volume(k);
    }
  out = out.cwiseSqrt();
  return {g, var == 1 ? out : Eigen::MatrixXd(out.transpose())};
}

DyadicFunction dyadic_maximal(const DyadicFunction& f) {
  const Grid& g = f.grid();
  return {g, ancestor_max(g, cube_means(g, f.samples().cwiseAbs()))};
}

ProductFunction strong_maximal(const ProductFunction& f) {
  const ProductGrid& g = f.grid();
  Eigen::MatrixXd means = map_variable(f.samples().cwiseAbs(), 1, [&](const Eigen::VectorXd& v) { return cube_means(g.first, v); });
  means = map_variable(means, 2, [&](const Eigen::VectorXd& v) { return cube_means(g.second, v); });
  means = map_variable(means, 1, [&](const Eigen::VectorXd& v) { return ancestor_max(g.first, v); });
  means = map_variable(means, 2, [&](const Eigen::VectorXd& v) { return ancestor_max(g.second, v); });
  return {g, means};
}

DyadicFunction vector_maximal(const std::vector<DyadicFunction>& family) {
  if (family.empty()) throw std::invalid_argument("vector_maximal needs a non-empty family");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(family.front().samples().size());
  for (const DyadicFunction& f : family) {
    require_same_grid(f.grid(), family.front().grid(), "vector_maximal");
    acc += dyadic_maximal(f).samples().cwiseAbs2();
  }
  return {family.front().grid(), acc.cwiseSqrt()};
}

double fs_check(const std::vector<DyadicFunction>& family, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("fs_check needs p > 1");
  const DyadicFunction num = vector_maximal(family);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(num.samples().size());
  for (const DyadicFunction& f : family) den += f.samples().cwiseAbs2();
  const double d = lp_of(den.cwiseSqrt(), p, num.cell_weight());
  return d > 0.0 ? lp_of(num.samples(), p, num.cell_weight()) / d : 0.0;
}

double jn_check(const DyadicFunction& a, Cube I, double p) {
  const Grid& g = a.grid();
  g.check(I);
  if (!(p > 0.0)) throw std::invalid_argument("jn_check needs p > 0");
  const double bmo = dyadic_bmo_norm(a);
  if (bmo <= 0.0) return 0.0;
  const Eigen::VectorXd e = per_volume(g, energy(g, a.samples()));
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(idx(g.size()));
  for (std::size_t cell : g.cells(I)) {
    double s = 0.0;
    for (int lvl = I.level; lvl < g.depth(); ++lvl) s += e[idx(g.flat(g.cube_of_cell(cell, lvl)))];
    vals[idx(cell)] = std::sqrt(s);
  }
  return lp_of(vals, p, a.cell_weight()) / (bmo * std::pow(g.volume(I), 1.0 / p));
}

double jn_check(const ProductFunction& a, Cube I1, Cube I2, double p) {
  const ProductGrid& g = a.grid();
  g.first.check(I1);
  g.second.check(I2);
  if (!(p > 0.0)) throw std::invalid_argument("jn_check needs p > 0");
  const double bmo = rect_bmo_norm(a);
  if (bmo <= 0.0) return 0.0;
  Eigen::MatrixXd e = map_variable(energy2(a), 1, [&](const Eigen::VectorXd& x) { return per_volume(g.first, x); });
  e = map_variable(e, 2, [&](const Eigen::VectorXd& x) { return per_volume(g.second, x); });
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(idx(g.first.size() * g.second.size()));
  for (std::size_t r : g.first.cells(I1))
    for (std::size_t c : g.second.cells(I2)) {
      double s = 0.0;
      for (int l1 = I1.level; l1 < g.first.depth(); ++l1)
        for (int l2 = I2.level; l2 < g.second.depth(); ++l2)
          s += e(idx(g.first.flat(g.first.cube_of_cell(r, l1))), idx(g.second.flat(g.second.cube_of_cell(c, l2))));
      vals[idx(r * g.second.size() + c)] = std::sqrt(s);
    }
  return lp_of(vals, p, a.cell_weight()) / (bmo * std::pow(g.first.volume(I1) * g.second.volume(I2), 1.0 / p));
}

double geometric_constant(double delta, int cap) {
  if (!(delta > 0.0)) throw std::invalid_argument("geometric_constant needs delta > 0");
  if (cap < 0) throw std::invalid_argument("geometric_constant needs cap >= 0");
  const double x = std::exp2(-delta / 2.0);
  double s = 0.0;
  for (int i = 0; i <= cap; ++i)
    for (int j = 0; j <= cap; ++j) {
      const int m = std::max(i, j);
      s += std::pow(x, m) * (1.0 + m);
    }
  return s;
}

double geometric_constant_limit(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("geometric_constant needs delta > 0");
  const double x = std::exp2(-delta / 2.0);
  const double r = 1.0 - x;
  return 2.0 * x * (1.0 + x) / (r * r * r) + 3.0 * x / (r * r) + 1.0 / r;
}

double geometric_tail_bound(double delta, int cap) {
  if (!(delta > 0.0)) throw std::invalid_argument("geometric_constant needs delta > 0");
  const double x = std::exp2(-delta / 2.0);
  // Terms t_m = (2m+1)(m+1) x^m; their ratio decreases in m, so from m = cap+1
  // on the tail is dominated by a geometric series.
  const double m = cap + 1.0;
  const double first = (2.0 * m + 1.0) * (m + 1.0) * std::pow(x, m);
  const double q = x * (2.0 * m + 3.0) * (m + 2.0) / ((2.0 * m + 1.0) * (m + 1.0));
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return first / (1.0 - q);
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double study_trial(const StudyConfig& cfg, const Grid& g, int k, int l, Rng& rng) {
  const std::string& kind = cfg.kind;
  if (kind == "Bk") {
    const DyadicFunction b = random_function(g, rng);
    const DyadicFunction f = random_function(g, rng);
    const BkOperator op{k, 0, 0, 0, haar_product_beta(g, k, 0)};
    return ratio(l2_norm(apply_Bk(op, b, f)), dyadic_bmo_norm(b) * l2_norm(f));
  }
  if (kind == "Sk") {
    const int from = std::uniform_int_distribution<int>(0, g.depth() - 1)(rng);
    const DyadicFunction f = random_band_function(g, from, rng);
    return ratio(l2_norm(square_function(f, k)), l2_norm(f));
  }
  if (kind == "P" || kind == "Pstar") {
    const DyadicFunction b = random_function(g, rng);
    const DyadicFunction a = random_function(g, rng);
    const DyadicFunction f = random_function(g, rng);
    const DyadicFunction out = kind == "P" ? apply_P(b, a, f) : apply_P_adjoint(b, a, f);
    return ratio(l2_norm(out), dyadic_bmo_norm(b) * dyadic_bmo_norm(a) * l2_norm(f));
  }
  const ProductGrid pg{g, g};
  const ProductFunction b = random_function(pg, rng);
  const ProductFunction f = random_function(pg, rng);
  const double base = rect_bmo_norm(b) * l2_norm(f);
  BiparamSpec spec;
  spec.first = BkOperator{k, 0, 0, 0, haar_product_beta(g, k, 0)};
  spec.second = BkOperator{l, 0, 0, 0, haar_product_beta(g, l, 0)};
  if (kind == "Bkl") {
    spec.kind = BiparamKind::Bkl;
    return ratio(l2_norm(apply_biparam(spec, b, f)), base);
  }
  if (kind == "BPk" || kind == "PBl") {
    const DyadicFunction a = random_function(g, rng);
    if (kind == "BPk") {
      spec.kind = BiparamKind::BPk;
      spec.symbol2 = a;
    } else {
      spec.kind = BiparamKind::PBl;
      spec.symbol1 = a;
    }
    return ratio(l2_norm(apply_biparam(spec, b, f)), base * dyadic_bmo_norm(a));
  }
  if (kind == "PP" || kind == "PP1") {
    const ProductFunction a = ProductFunction::tensor(random_function(g, rng), random_function(g, rng));
    spec.kind = kind == "PP" ? BiparamKind::PP : BiparamKind::PP1;
    spec.symbol = a;
    return ratio(l2_norm(apply_biparam(spec, b, f)), base * rect_bmo_norm(a));
  }
  throw std::invalid_argument("unknown study kind: " + kind);
}

}  // namespace

std::vector<NormReport> uniformity_study(const StudyConfig& cfg) {
  const Grid g(GridSpec{cfg.d, cfg.N, {}});
  const bool two = cfg.kind == "Bkl" || cfg.kind == "BPk" || cfg.kind == "PBl" || cfg.kind == "PP" || cfg.kind == "PP1";
  const bool no_k = cfg.kind == "P" || cfg.kind == "Pstar" || cfg.kind == "PP" || cfg.kind == "PP1";
  const int kmax = (no_k || cfg.kind == "PBl") ? 0 : cfg.k_max;
  const int lmax = (two && (cfg.kind == "Bkl" || cfg.kind == "PBl")) ? cfg.l_max : 0;
  if (cfg.trials <= 0) throw std::invalid_argument("uniformity_study needs trials > 0");
  std::vector<NormReport> out;
  for (int k = 0; k <= kmax; ++k)
    for (int l = 0; l <= lmax; ++l) {
      std::vector<double> ratios(static_cast<std::size_t>(cfg.trials));
      const std::uint64_t cell_seed = derive_seed(cfg.seed, tag_seed(cfg.kind), static_cast<std::uint64_t>(k),
                                                  static_cast<std::uint64_t>(l));
      parallel_for(ratios.size(), cfg.threads, [&](std::size_t t) {
        Rng rng(derive_seed(cell_seed, t));
        ratios[t] = study_trial(cfg, g, k, l, rng);
      });
      out.push_back({cfg.kind, k, l, 0, 0, cfg.trials, *std::max_element(ratios.begin(), ratios.end()), cell_seed});
    }
  return out;
}

std::string to_json_line(const NormReport& r) {
  const nlohmann::ordered_json j = {{"kind", r.kind}, {"k", r.k},         {"l", r.l},
                                    {"i", r.i},       {"j", r.j},         {"trials", r.trials},
                                    {"max_ratio", r.max_ratio}, {"seed", r.seed}};
  return j.dump();
}

std::string csv_header() { return "kind,k,l,i,j,trials,max_ratio,seed"; }

std::string to_csv_line(const NormReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", r.max_ratio);
  return r.kind + "," + std::to_string(r.k) + "," + std::to_string(r.l) + "," + std::to_string(r.i) + "," +
         std::to_string(r.j) + "," + std::to_string(r.trials) + "," + buf + "," + std::to_string(r.seed);
}

}  // namespace dyadic
