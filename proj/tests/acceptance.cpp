// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "dyadic/norms.hpp"
#include "dyadic/runner.hpp"
#include "oracles.hpp"

using namespace dyadic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

RunReport runner(RunConfig c) { return run(c); }

double summary(const RunReport& r, const char* suite, const char* key) {
  return r.report.at("summary").at(suite).at(key).get<double>();
}

Grid grid(int d, int n) { return Grid(GridSpec{d, n, {}}); }

// ---------------------------------------------------------------------------

Outcome identity_one_parameter() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig c;
  c.command = "verify-decomp";
  c.only_case = "cancellative";
  c.d = 1;
  c.N = 6;
  c.imax = c.jmax = 4;
  c.trials = 100;
  const auto a = runner(c);
  c.d = 2;
  c.N = 3;
  c.imax = c.jmax = 2;
  const auto b = runner(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ra = summary(a, "one", "max_residual"), rb = summary(b, "one", "max_residual");
  return {a.pass && b.pass && secs < 120.0, "d=1 N=6 max residual " + num(ra) + ", d=2 N=3 max residual " + num(rb) +
                                                ", " + num(secs) + " s"};
}

Outcome identity_noncancellative() {
  RunConfig c;
  c.command = "verify-decomp";
  c.N = 5;
  c.trials = 100;
  c.imax = c.jmax = 0;
  bool pass = true;
  double worst = 0.0;
  for (const char* label : {"noncancellative-analysis", "noncancellative-synthesis"}) {
    c.only_case = label;
    const auto r = runner(c);
    pass = pass && r.pass;
    worst = std::max(worst, summary(r, "one", "max_residual"));
  }
  c.d = 2;
  c.N = 3;
  double cube = 0.0;
  for (const char* label : {"same-cube-analysis", "same-cube-synthesis"}) {
    c.only_case = label;
    const auto r = runner(c);
    pass = pass && r.pass;
    cube = std::max(cube, summary(r, "same_cube", "max_residual"));
  }
  return {pass, "max residual " + num(worst) + ", same-cube max " + num(cube) + " (d=2 N=3)"};
}

Outcome identity_biparam() {
  RunConfig c;
  c.command = "verify-decomp";
  c.suite = "bi";
  c.N = 4;
  c.imax = c.jmax = 2;
  c.trials = 50;
  const auto r = runner(c);
  std::size_t worst_count = 0;
  for (const auto& row : r.report.at("results")) worst_count = std::max(worst_count, row.at("term_count").get<std::size_t>());
  return {r.pass, std::to_string(r.report.at("results").size()) + " cases, max residual " +
                      num(summary(r, "bi", "max_residual")) + ", C = " +
                      std::to_string(r.report.at("summary").at("bi").at("term_constant").get<int>()) +
                      ", largest term count " + std::to_string(worst_count)};
}

Outcome shift_contraction() {
  std::vector<std::array<int, 4>> points;  // d, N, i, j
  for (auto [d, top] : {std::pair{1, 6}, std::pair{2, 3}, std::pair{3, 2}})
    for (int n = 1; n <= top; ++n)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) points.push_back({d, n, i, j});
  Rng rng(404);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const auto [d, n, i, j] = points[static_cast<std::size_t>(s) % points.size()];
    const Grid g = grid(d, n);
    const auto op = random_shift(g, i, j, rng());
    for (int t = 0; t < 10; ++t) {
      const auto f = random_function(g, rng);
      worst = std::max(worst, l2_norm(apply_shift(op, f)) / l2_norm(f));
    }
  }
  return {worst <= 1.0 + 1e-12, "1000 shifts over " + std::to_string(points.size()) + " (d,N,i,j) points, max ratio " +
                                    num(worst)};
}

Outcome uniform_bk() {
  StudyConfig s;
  s.kind = "Bk";
  s.d = 1;
  s.N = 10;
  s.k_max = 8;
  s.trials = 100;
  s.seed = 5;
  double worst = 0.0;
  for (const auto& r : uniformity_study(s)) worst = std::max(worst, r.max_ratio);
  return {worst <= 1.0 + 1e-12, "k=0..8, 100 trials each, max ||B_k(b,f)|| / (||b||_BMO ||f||) = " + num(worst)};
}

Outcome oracle_equivalence() {
  Rng rng(606);
  double worst = 0.0;
  std::size_t checks = 0;
  auto note = [&](const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    worst = std::max(worst, oracle::rel(got, want));
    ++checks;
  };
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  for (const Grid& g : {grid(1, 3), grid(2, 2)}) {
    const auto m = static_cast<int>(g.cancellative_count());
    const Signature nc = g.noncancellative();
    for (int t = 0; t < 20; ++t) {
      const auto b = random_function(g, rng), a = random_function(g, rng), f = random_function(g, rng);
      const int k = pick(g.depth());
      const auto sb = static_cast<Signature>(pick(m));
      Signature si = static_cast<Signature>(pick(m)), so = static_cast<Signature>(pick(m));
      if (k == 0 && t % 3 == 1) si = nc;
      if (k == 0 && t % 3 == 2) so = nc;
      const BkOperator op{k, sb, si, so, haar_product_beta(g, k, sb)};
      note(apply_Bk(op, b, f).samples(), oracle::Bk(g, k, sb, si, so, b.samples(), f.samples()));
      note(apply_P(b, a, f).samples(), oracle::P(g, b.samples(), a.samples(), f.samples()));
      note(apply_P_adjoint(b, a, f).samples(), oracle::P_adjoint(g, b.samples(), a.samples(), f.samples()));
      const auto s = t % 3 == 0 ? random_shift(g, pick(g.depth()), pick(g.depth()), rng())
                                : random_shift(g, 0, 0, rng(), ShiftKind::noncancellative,
                                               t % 3 == 1 ? Orientation::analysis : Orientation::synthesis);
      note(apply_shift(s, f).samples(), oracle::shift(s, f.samples()));
    }
  }

  const ProductGrid pg{grid(1, 3), grid(1, 3)};
  auto bk = [&](const Grid& g, oracle::BkSpec s) { return BkOperator{s.k, s.sb, s.si, s.so, haar_product_beta(g, s.k, s.sb)}; };
  for (int t = 0; t < 20; ++t) {
    const auto b = random_function(pg, rng), f = random_function(pg, rng), a = random_function(pg, rng);
    const auto a1 = random_function(pg.first, rng), a2 = random_function(pg.second, rng);
    const oracle::BkSpec s1{pick(3), 0, 0, 0}, s2{pick(3), 0, 0, 0};
    BiparamSpec spec;
    spec.kind = BiparamKind::Bkl;
    spec.first = bk(pg.first, s1);
    spec.second = bk(pg.second, s2);
    note(apply_biparam(spec, b, f).samples(), oracle::Bkl(pg, s1, s2, b.samples(), f.samples()));
    spec = {};
    spec.kind = BiparamKind::PP;
    spec.symbol = a;
    note(apply_biparam(spec, b, f).samples(), oracle::PP(pg, b.samples(), a.samples(), f.samples()));
    spec.kind = BiparamKind::PP1;
    note(apply_biparam(spec, b, f).samples(), oracle::PP1(pg, b.samples(), a.samples(), f.samples()));
    spec = {};
    spec.kind = BiparamKind::BPk;
    spec.first = bk(pg.first, s1);
    spec.symbol2 = a2;
    note(apply_biparam(spec, b, f).samples(), oracle::BPk(pg, s1, a2.samples(), b.samples(), f.samples()));
    spec = {};
    spec.kind = BiparamKind::PBl;
    spec.second = bk(pg.second, s2);
    spec.symbol1 = a1;
    note(apply_biparam(spec, b, f).samples(), oracle::PBl(pg, a1.samples(), s2, b.samples(), f.samples()));
  }
  return {worst < 1e-10, std::to_string(checks) + " comparisons, max relative residual " + num(worst)};
}

Outcome geometric() {
  // Closed-form series summed directly, far past the point where terms vanish.
  double series = 0.0;
  for (int m = 0; m <= 400; ++m) series += (2.0 * m + 1.0) * (1.0 + m) * std::pow(2.0, -m);
  const double g = geometric_constant(2.0, 60);
  const double tail = geometric_tail_bound(2.0, 60);
  return {std::abs(g - 20.0) <= 1e-10 && std::abs(series - 20.0) <= 1e-10,
          "geometric_constant(2, 60) = " + std::to_string(g) + ", series " + std::to_string(series) +
              ", tail bound " + num(tail)};
}

Outcome empirical_bound() {
  RunConfig c;
  c.command = "bound-study";
  c.N = 6;
  c.imax = c.jmax = 4;
  c.trials = 100;
  const auto r = runner(c);
  const double ratio = r.report.at("summary").at("max_ratio").get<double>();
  return {r.pass, "max ratio " + num(ratio) + " against pinned ceiling " + num(kCommutatorRatioCeiling)};
}

Outcome monte_carlo() {
  RunConfig c;
  c.command = "mc-demo";
  c.N = 6;
  c.samples = 10000;
  c.seed = 7;
  const auto r = runner(c);
  const auto& rows = r.report.at("results");
  auto line = [&](std::size_t x) {
    const auto& row = rows[x];
    return row.at("test").get<std::string>() + " " + std::to_string(row.at("exceed").get<std::size_t>()) + "/" +
           std::to_string(row.at("entries").get<std::size_t>()) + " beyond 3 se (chance " +
           num(row.at("expected_exceed").get<double>()) + ")";
  };
  return {r.pass, line(0) + ", " + line(1) + ", " + line(2)};
}

Outcome core_algebra() {
  RunConfig c;
  c.command = "selftest";
  c.bound_tolerance = 0.0;  // jn_check(p = 2) <= 1 with no slack
  bool pass = true;
  double worst = 0.0, jn = 0.0;
  for (auto [d, n] : {std::pair{1, 6}, std::pair{2, 3}}) {
    c.d = d;
    c.N = n;
    const auto r = runner(c);
    pass = pass && r.pass;
    for (const auto& [k, v] : r.report.at("summary").items())
      if (k == "jn_p2") jn = std::max(jn, v.get<double>());
      else worst = std::max(worst, v.get<double>());
  }
  return {pass, "max algebra residual " + num(worst) + ", max jn_check(p=2) " + num(jn)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"decomposition identity, one-parameter", identity_one_parameter},
      {"decomposition identity, noncancellative", identity_noncancellative},
      {"decomposition identity, bi-parameter", identity_biparam},
      {"shift contraction", shift_contraction},
      {"uniform B_k bound", uniform_bk},
      {"oracle equivalence", oracle_equivalence},
      {"geometric constant", geometric},
      {"empirical commutator bound", empirical_bound},
      {"Monte Carlo representation demo", monte_carlo},
      {"core algebra", core_algebra}};
  int failed = 0;
  for (std::size_t x = 0; x < criteria.size(); ++x) {
    Outcome o;
    try {
      o = criteria[x].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", x + 1, criteria[x].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
