#include "dyadic/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyadic/decomp.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

namespace {

constexpr int kBlock = 64;

// Running mean and sum of squared deviations.
struct Moments {
  int n = 0;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd m2;

  void add(const Eigen::MatrixXd& x) {
    if (n == 0) {
      mean = Eigen::MatrixXd::Zero(x.rows(), x.cols());
      m2 = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    }
    ++n;
    const Eigen::MatrixXd delta = x - mean;
    mean += delta / n;
    m2 += delta.cwiseProduct(x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Moments out;
    out.n = a.n + b.n;
    const Eigen::MatrixXd delta = b.mean - a.mean;
    const double wb = static_cast<double>(b.n) / out.n;
    out.mean = a.mean + delta * wb;
    out.m2 = a.m2 + b.m2 + delta.cwiseAbs2() * (static_cast<double>(a.n) * wb);
    return out;
  }
};

Moments merge_tree(std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return Moments::merge(merge_tree(parts, lo, mid), merge_tree(parts, mid, hi));
}

double normal_tail(double sigmas) { return std::erfc(sigmas / std::sqrt(2.0)); }

// Averages several matrices per sample; fn returns them for one shifted grid.
template <class Fn>
std::vector<AverageResult> average_matrices(const GridSpec& base, int samples, std::uint64_t seed, unsigned threads,
                                            std::size_t outputs, Fn&& fn) {
  if (samples <= 0) throw std::invalid_argument("average_operator needs samples > 0");
  const std::size_t blocks = (static_cast<std::size_t>(samples) + kBlock - 1) / kBlock;
  std::vector<std::vector<Moments>> parts(outputs, std::vector<Moments>(blocks));
  std::vector<int> skipped(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const int first = static_cast<int>(blk) * kBlock;
    const int last = std::min(samples, first + kBlock);
    for (int s = first; s < last; ++s) {
      const OmegaSample omega = sample_omega(base.dim, base.depth, derive_seed(seed, static_cast<std::uint64_t>(s)));
      std::vector<Eigen::MatrixXd> m;
      try {
        m = fn(Grid(shifted_grid(base, omega)));
      } catch (const std::exception&) {
        ++skipped[blk];
        continue;
      }
      for (std::size_t o = 0; o < outputs; ++o) parts[o][blk].add(m[o]);
    }
  });
  int skip = 0;
  for (int s : skipped) skip += s;
  const auto n = static_cast<Eigen::Index>(base.size());
  std::vector<AverageResult> out(outputs);
  for (std::size_t o = 0; o < outputs; ++o) {
    AverageResult& r = out[o];
    r.threads = threads;
    r.seed = seed;
    r.skipped = skip;
    const Moments all = merge_tree(parts[o], 0, blocks);
    r.samples = all.n;
    if (all.n == 0) {
      r.mean = Eigen::MatrixXd::Zero(n, n);
      r.stderr_ = Eigen::MatrixXd::Zero(n, n);
      continue;
    }
    r.mean = all.mean;
    r.stderr_ = all.n > 1 ? Eigen::MatrixXd((all.m2 / ((all.n - 1.0) * all.n)).cwiseSqrt())
                          : Eigen::MatrixXd::Zero(n, n);
  }
  return out;
}

}  // namespace

OmegaSample sample_omega(int d, int N, std::uint64_t seed) {
  if (d < 1 || N < 1) throw std::invalid_argument("sample_omega needs d, N >= 1");
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  OmegaSample out;
  out.seed = seed;
  out.offsets.assign(static_cast<std::size_t>(N), std::vector<int>(static_cast<std::size_t>(d)));
  for (auto& level : out.offsets)
    for (int& bit : level) bit = coin(rng) ? 1 : 0;
  return out;
}

GridSpec shifted_grid(const GridSpec& base, const OmegaSample& omega) {
  GridSpec out{base.dim, base.depth, omega.offsets};
  out.validate();
  return out;
}

AverageResult average_operator(const GridSpec& base, const OperatorBuilder& builder, int samples, std::uint64_t seed,
                               unsigned threads) {
  return average_matrices(base, samples, seed, threads, 1, [&](const Grid& g) {
    return std::vector<Eigen::MatrixXd>{assemble(builder(g))};
  }).front();
}

ShiftOperator petermichl_shift(const Grid& grid) {
  if (grid.dim() != 1) throw std::invalid_argument("petermichl_shift is one-dimensional");
  if (grid.depth() < 2) throw DepthError("petermichl_shift needs N >= 2");
  const double a = 1.0 / std::sqrt(2.0);
  std::vector<ShiftEntry> entries;
  for (int k = 0; k + 1 < grid.depth(); ++k)
    for (std::size_t q = 0; q < grid.cubes_at(k); ++q) {
      const Cube K{k, q};
      entries.push_back({K, {K, 0}, {grid.child(K, 0), 0}, a});
      entries.push_back({K, {K, 0}, {grid.child(K, 1), 0}, -a});
    }
  return ShiftOperator(grid, 0, 1, std::move(entries));
}

SymmetryTest toeplitz_test(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& stderr_, double sigmas) {
  const Eigen::Index n = mean.rows();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) diag[(r - c + n) % n] += mean(r, c);
  diag /= static_cast<double>(n);
  SymmetryTest t;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const double dev = std::abs(mean(r, c) - diag[(r - c + n) % n]);
      ++t.entries;
      if (stderr_(r, c) > 0.0) {
        const double z = dev / stderr_(r, c);
        t.max_z = std::max(t.max_z, z);
        if (z > sigmas) ++t.exceed;
      } else {
        t.max_exact_dev = std::max(t.max_exact_dev, dev);
        if (dev > 1e-12) ++t.exceed;
      }
    }
  t.expected_exceed = static_cast<double>(t.entries) * normal_tail(sigmas);
  t.pass = t.exceed == 0;
  return t;
}

SymmetryTest antisymmetry_test(const Eigen::MatrixXd& sym_mean, const Eigen::MatrixXd& sym_stderr, double sigmas) {
  SymmetryTest t;
  const Eigen::Index n = sym_mean.rows();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = r; c < n; ++c) {
      const double dev = std::abs(sym_mean(r, c));
      ++t.entries;
      if (sym_stderr(r, c) > 0.0) {
        const double z = dev / sym_stderr(r, c);
        t.max_z = std::max(t.max_z, z);
        if (z > sigmas) ++t.exceed;
      } else {
        t.max_exact_dev = std::max(t.max_exact_dev, dev);
        if (dev > 1e-12) ++t.exceed;
      }
    }
  t.expected_exceed = static_cast<double>(t.entries) * normal_tail(sigmas);
  t.pass = t.exceed == 0;
  return t;
}

RepresentationDemo representation_demo(int N, int samples, std::uint64_t seed, unsigned threads) {
  const GridSpec base{1, N, {}};
  RepresentationDemo demo;
  auto both = average_matrices(base, samples, seed, threads, 2, [](const Grid& g) {
    const Eigen::MatrixXd m = assemble(shift_handle(petermichl_shift(g)));
    return std::vector<Eigen::MatrixXd>{m, m + m.transpose()};
  });
  demo.average = std::move(both[0]);
  demo.symmetrised = std::move(both[1]);
  demo.toeplitz = toeplitz_test(demo.average.mean, demo.average.stderr_);
  demo.antisymmetry = antisymmetry_test(demo.symmetrised.mean, demo.symmetrised.stderr_);
  const auto single = average_operator(
      base, [](const Grid& g) { return shift_handle(petermichl_shift(g)); }, 1, seed, 1);
  demo.single_toeplitz = toeplitz_test(single.mean, single.stderr_);
  return demo;
}

double commutator_trial_norm(const Grid& grid, int i, int j, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  const ShiftOperator s = random_shift(grid, i, j, rng());
  DyadicFunction b = random_function(grid, rng);
  DyadicFunction f = random_function(grid, rng);
  const double bmo = dyadic_bmo_norm(b);
  b *= bmo > 0.0 ? 1.0 / bmo : 0.0;
  f *= 1.0 / l2_norm(f);
  return l2_norm(commutator(b, s, f));
}

BoundStudy commutator_bound_study(double delta, int i_max, int j_max, int trials, std::uint64_t seed, int N,
                                  unsigned threads) {
  if (!(delta > 0.0)) throw std::invalid_argument("bound study needs delta > 0");
  if (trials <= 0) throw std::invalid_argument("bound study needs trials > 0");
  if (i_max < 0 || j_max < 0 || std::max(i_max, j_max) >= N)
    throw DepthError("bound study caps must satisfy max(i, j) < N");
  const Grid g(GridSpec{1, N, {}});
  BoundStudy out;
  out.delta = delta;
  out.cap = std::max(i_max, j_max);
  for (int i = 0; i <= i_max; ++i)
    for (int j = 0; j <= j_max; ++j) {
      std::vector<double> norms(static_cast<std::size_t>(trials));
      const std::uint64_t cell = derive_seed(seed, tag_seed("commutator"), static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(j));
      parallel_for(norms.size(), threads,
                   [&](std::size_t t) { norms[t] = commutator_trial_norm(g, i, j, derive_seed(cell, t)); });
      const auto worst = std::max_element(norms.begin(), norms.end());
      const double sup = *worst;
      out.worst_seeds.push_back(derive_seed(cell, static_cast<std::uint64_t>(worst - norms.begin())));
      const int mx = std::max(i, j);
      NormReport r{"commutator", 0, 0, i, j, trials, sup / (1.0 + mx), cell};
      out.reports.push_back(r);
      out.sup_norms.push_back(sup);
      out.max_ratio = std::max(out.max_ratio, r.max_ratio);
      out.weighted_total += std::pow(2.0, -mx * delta / 2.0) * sup;
    }
  out.geometric = geometric_constant(delta, out.cap);
  out.geometric_limit = geometric_constant_limit(delta);
  out.tail_bound = geometric_tail_bound(delta, out.cap);
  return out;
}

}  // namespace dyadic
