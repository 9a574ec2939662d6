#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dyadic/linear_operator.hpp"
#include "dyadic/norms.hpp"

namespace dyadic {

/// Per-level offsets omega_1..omega_N in {0,1}^d.
struct OmegaSample {
  std::vector<std::vector<int>> offsets;
  std::uint64_t seed = 0;
};

OmegaSample sample_omega(int d, int N, std::uint64_t seed);
GridSpec shifted_grid(const GridSpec& base, const OmegaSample& omega);

using OperatorBuilder = std::function<LinearOperatorHandle(const Grid&)>;

struct AverageResult {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stderr_;  // per-entry standard error of the mean
  int samples = 0;          // samples that contributed
  int skipped = 0;          // builder failures
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

/// Monte Carlo mean of the assembled operators over `samples` random grids.
/// Sample s uses omega from derive_seed(seed, s). Partial sums are merged in
/// a fixed tree keyed by sample index, so the result is bit-identical for any
/// thread count.
AverageResult average_operator(const GridSpec& base, const OperatorBuilder& builder, int samples, std::uint64_t seed,
                               unsigned threads = 1);

/// d = 1, i = 0, j = 1: h_K -> 2^{-1/2} (h_{K left} - h_{K right}) on every K
/// at levels 0..N-2 of the given grid.
ShiftOperator petermichl_shift(const Grid& grid);

struct SymmetryTest {
  double max_z = 0.0;           // largest |deviation| / stderr over entries with stderr > 0
  double max_exact_dev = 0.0;   // largest |deviation| over entries with stderr == 0
  std::size_t entries = 0;
  std::size_t exceed = 0;       // entries beyond `sigmas` standard errors (or 1e-12 when stderr == 0)
  double expected_exceed = 0.0; // entries * P(|Z| > sigmas) under a normal model
  bool pass = false;            // exceed == 0
};

/// Each entry against the mean of its circulant diagonal (row - col mod n).
SymmetryTest toeplitz_test(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& stderr_, double sigmas = 3.0);
/// mean + mean^T against zero, with the standard error of the symmetrised samples.
SymmetryTest antisymmetry_test(const Eigen::MatrixXd& sym_mean, const Eigen::MatrixXd& sym_stderr,
                               double sigmas = 3.0);

struct RepresentationDemo {
  AverageResult average;
  AverageResult symmetrised;  // averages of S + S^T
  SymmetryTest toeplitz;
  SymmetryTest antisymmetry;
  SymmetryTest single_toeplitz;  // one omega sample, no averaging
};

RepresentationDemo representation_demo(int N, int samples, std::uint64_t seed, unsigned threads = 1);

struct BoundStudy {
  double delta = 1.0;
  std::vector<NormReport> reports;  // kind "commutator", max_ratio = sup / (1 + max(i, j))
  std::vector<double> sup_norms;    // sup ||[b, S] f|| with ||b||_BMO = ||f|| = 1, per report
  std::vector<std::uint64_t> worst_seeds;  // trial seed attaining each sup
  double weighted_total = 0.0;      // sum 2^{-max(i,j) delta/2} sup_norms
  double max_ratio = 0.0;
  double geometric = 0.0;           // geometric_constant(delta, cap)
  double geometric_limit = 0.0;
  double tail_bound = 0.0;
  int cap = 0;
};

/// ||[b, S] f|| for one random (b, S, f) drawn from `trial_seed`, with b
/// scaled to dyadic BMO 1, f to unit norm and S a random cancellative S^{ij}.
double commutator_trial_norm(const Grid& grid, int i, int j, std::uint64_t trial_seed);

/// Random b (dyadic BMO 1), unit f and random cancellative S^{ij} for all
/// i <= i_max, j <= j_max on a d = 1 grid of depth N.
BoundStudy commutator_bound_study(double delta, int i_max, int j_max, int trials, std::uint64_t seed, int N = 6,
                                  unsigned threads = 1);

}  // namespace dyadic
