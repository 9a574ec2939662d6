#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dyadic/decomp.hpp"
#include "dyadic/montecarlo.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

// Exact expectation over all 2^N offset sequences (d = 1).
Eigen::MatrixXd exact_petermichl_average(int N) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << N);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  const int count = 1 << N;
  for (int w = 0; w < count; ++w) {
    OmegaSample o;
    for (int l = 0; l < N; ++l) o.offsets.push_back({(w >> l) & 1});
    e += assemble(shift_handle(petermichl_shift(Grid(shifted_grid({1, N, {}}, o)))));
  }
  return e / count;
}

}  // namespace

TEST_CASE("omega samples") {
  const auto a = sample_omega(2, 5, 11), b = sample_omega(2, 5, 11);
  CHECK(a.offsets == b.offsets);
  CHECK(a.offsets.size() == 5);
  for (const auto& level : a.offsets) {
    CHECK(level.size() == 2);
    for (int bit : level) CHECK((bit == 0 || bit == 1));
  }
  const GridSpec base{1, 4, {}};
  OmegaSample zero;
  zero.offsets.assign(4, {0});
  const Grid z(shifted_grid(base, zero)), std(base);
  for (int k = 0; k <= 4; ++k)
    for (std::size_t q = 0; q < z.cubes_at(k); ++q) CHECK(z.cells({k, q}) == std.cells({k, q}));
}

TEST_CASE("offsets act only on cubes longer than their step") {
  // omega_1 (step 1/2) only moves the root, which the torus absorbs.
  OmegaSample o;
  o.offsets = {{1}, {0}};
  const Grid g(shifted_grid({1, 2, {}}, o));
  CHECK(g.cells({1, 0}) == std::vector<std::size_t>{0, 1});
  CHECK(g.cells({1, 1}) == std::vector<std::size_t>{2, 3});
  // omega_2 (step 1/4) moves [0, 1/2) to [1/4, 3/4) and wraps the other half.
  o.offsets = {{0}, {1}};
  const Grid h(shifted_grid({1, 2, {}}, o));
  CHECK(h.cells({1, 0}) == std::vector<std::size_t>{1, 2});
  CHECK(h.cells({1, 1}) == std::vector<std::size_t>{3, 0});
}

TEST_CASE("averaging trivial builders") {
  const GridSpec base{1, 3, {}};
  const auto zero = average_operator(base, [](const Grid& g) { return zero_handle(g); }, 50, 1);
  CHECK(zero.mean.isZero(0.0));
  CHECK(zero.stderr_.isZero(0.0));
  CHECK(zero.samples == 50);

  const Grid fixed_grid(base);
  const auto fixed = shift_handle(random_shift(fixed_grid, 1, 0, 3));
  const auto avg = average_operator(base, [&](const Grid&) { return fixed; }, 130, 2);
  CHECK((avg.mean - assemble(fixed)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(avg.stderr_.isZero(0.0));
}

TEST_CASE("builder failures are skipped and counted") {
  const GridSpec base{1, 3, {}};
  const auto r = average_operator(
      base,
      [](const Grid& g) {
        if (g.spec().omega.front().front() == 1) throw std::runtime_error("rejected");
        return identity_handle(g);
      },
      200, 5);
  CHECK(r.samples + r.skipped == 200);
  CHECK(r.skipped > 50);
  CHECK(r.samples > 50);
  CHECK((r.mean - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("averaging is linear and thread-independent") {
  const GridSpec base{1, 4, {}};
  auto a = [](const Grid& g) { return shift_handle(petermichl_shift(g)); };
  auto b = [](const Grid& g) { return shift_handle(random_shift(g, 1, 1, 4)); };
  auto combo = [&](const Grid& g) {
    const auto ha = a(g), hb = b(g);
    return LinearOperatorHandle{g, [ha, hb](const Eigen::VectorXd& v) { return Eigen::VectorXd(2.5 * ha.apply(v) + hb.apply(v)); },
                                nullptr, "combo", {}};
  };
  const auto ra = average_operator(base, a, 300, 9), rb = average_operator(base, b, 300, 9);
  const auto rc = average_operator(base, combo, 300, 9);
  CHECK((rc.mean - (2.5 * ra.mean + rb.mean)).cwiseAbs().maxCoeff() < 1e-12);

  const auto one = average_operator(base, a, 300, 9, 1), three = average_operator(base, a, 300, 9, 3);
  CHECK(one.mean == three.mean);
  CHECK(one.stderr_ == three.stderr_);
}

TEST_CASE("fixed-pattern shift is an isometry on mean-zero functions") {
  const Grid g(GridSpec{1, 5, {{1}, {0}, {1}, {1}, {0}}});
  const auto s = petermichl_shift(g);
  CHECK(s.max_block_frobenius() == doctest::Approx(1.0));
  CHECK(s.max_normalized_coefficient() == doctest::Approx(1.0));
  Rng rng(1);
  const auto f = random_band_function(g, 0, rng);
  // Coefficients on the finest cancellative level have nowhere to go.
  const auto c = haar_forward(f);
  double lost = 0.0;
  for (std::size_t q = 0; q < g.cubes_at(4); ++q) lost += std::pow(c[{{4, q}, 0}], 2);
  CHECK(std::pow(l2_norm(apply_shift(s, f)), 2) == doctest::Approx(std::pow(l2_norm(f), 2) - lost));
}

TEST_CASE("exact average over all grids is circulant and antisymmetric") {
  const Eigen::MatrixXd e = exact_petermichl_average(6);
  const Eigen::Index n = e.rows();
  double circ = 0.0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) circ = std::max(circ, std::abs(e(r, c) - e((r + 1) % n, (c + 1) % n)));
  CHECK(circ < 1e-14);
  CHECK((e + e.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(e.norm() > 1.0);
}

TEST_CASE("Monte Carlo average approaches the exact average") {
  const Eigen::MatrixXd e = exact_petermichl_average(5);
  const auto demo = representation_demo(5, 2000, 3);
  const Eigen::MatrixXd z = (demo.average.mean - e).cwiseAbs().cwiseQuotient(demo.average.stderr_);
  CHECK(z.maxCoeff() < 5.0);
  CHECK(demo.single_toeplitz.exceed > 0);
  CHECK(!demo.single_toeplitz.pass);
  CHECK(demo.toeplitz.expected_exceed == doctest::Approx(1024 * std::erfc(3.0 / std::sqrt(2.0))));
}

TEST_CASE("symmetry tests on synthetic input") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, -1, -1, 0, 1, 1, -1, 0;
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  CHECK(toeplitz_test(m, zero).pass);
  CHECK(antisymmetry_test(m + m.transpose(), zero).pass);
  Eigen::MatrixXd bumped = m;
  bumped(0, 1) += 0.1;
  CHECK(!toeplitz_test(bumped, zero).pass);
  CHECK(toeplitz_test(bumped, Eigen::MatrixXd::Constant(3, 3, 0.1)).pass);
}

TEST_CASE("commutator bound study") {
  const auto study = commutator_bound_study(1.0, 2, 2, 10, 4, 5);
  CHECK(study.reports.size() == 9);
  CHECK(study.geometric == doctest::Approx(geometric_constant(1.0, 2)));
  CHECK(study.weighted_total <= study.geometric * study.max_ratio * (1 + 1e-12));
  for (std::size_t x = 0; x < study.reports.size(); ++x) {
    const auto& r = study.reports[x];
    CHECK(r.max_ratio * (1 + std::max(r.i, r.j)) == doctest::Approx(study.sup_norms[x]));
    CHECK(r.max_ratio > 0.0);
    CHECK(commutator_trial_norm(Grid(GridSpec{1, 5, {}}), r.i, r.j, study.worst_seeds[x]) == study.sup_norms[x]);
  }
  const auto again = commutator_bound_study(1.0, 2, 2, 10, 4, 5, 3);
  CHECK(again.weighted_total == study.weighted_total);
  CHECK_THROWS(commutator_bound_study(1.0, 5, 0, 1, 1, 5));
}
