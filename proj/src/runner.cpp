#include "dyadic/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "dyadic/decomp.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/montecarlo.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/parallel.hpp"
#include "dyadic/paraproduct.hpp"
#include "dyadic/product.hpp"
#include "dyadic/random.hpp"

namespace dyadic {

double jn_ceiling(double p) {
  static const std::map<double, double> pinned = {{1.25, 1.96}, {1.5, 1.78}, {2.0, 1.0}, {3.0, 1.9}};
  const auto it = pinned.find(p);
  return it == pinned.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

namespace {

const std::vector<std::string> kCommands = {"verify-decomp", "norm-study", "jn-check",
                                            "mc-demo",       "bound-study", "selftest"};
const std::vector<std::string> kKinds = {"Bk", "Sk", "P", "Pstar", "Bkl", "BPk", "PBl", "PP", "PP1"};

Grid grid_of(int d, int n) { return Grid(GridSpec{d, n, {}}); }

int n2_of(const RunConfig& c) { return c.N2 > 0 ? c.N2 : c.N; }
int i2_of(const RunConfig& c) { return c.i2max >= 0 ? c.i2max : c.imax; }
int j2_of(const RunConfig& c) { return c.j2max >= 0 ? c.j2max : c.jmax; }

void need(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

template <class T>
bool one_of(const T& v, const std::vector<T>& set) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// Accumulates rows, failures and the first replay.
struct Collector {
  Json rows = Json::array();
  std::vector<std::string> failures;
  std::optional<std::uint64_t> replay_seed;
  std::string replay_args;

  void fail(const std::string& what, std::uint64_t seed, const std::string& args) {
    failures.push_back(what);
    if (!replay_seed) {
      replay_seed = seed;
      replay_args = args;
    }
  }
};

// ---------------------------------------------------------------- verify-decomp

ShiftOperator make_shift(const Grid& g, const std::string& tag, int i, int j, std::uint64_t seed) {
  if (tag == "c") return random_shift(g, i, j, seed);
  return random_shift(g, 0, 0, seed, ShiftKind::noncancellative,
                      tag == "n" ? Orientation::analysis : Orientation::synthesis);
}

std::string long_label(const std::string& tag) {
  return tag == "c" ? "cancellative" : tag == "n" ? "noncancellative-analysis" : "noncancellative-synthesis";
}

struct CaseSpec {
  std::string label;
  std::vector<std::string> tags;  // one per variable
  std::vector<int> ij;            // i, j per variable
};

std::uint64_t case_seed(const RunConfig& c, const CaseSpec& s) {
  std::uint64_t packed = 0;
  for (int x : s.ij) packed = packed * 64 + static_cast<std::uint64_t>(x);
  return derive_seed(c.seed, tag_seed(s.label), packed);
}

std::string replay_args(const RunConfig& c, const CaseSpec& s, std::uint64_t trial) {
  std::ostringstream a;
  const bool bi = s.tags.size() == 2;
  a << "verify-decomp --suite " << (bi ? "bi" : "one") << " --d " << c.d << " --N " << c.N;
  if (bi) a << " --d2 " << c.d2 << " --N2 " << n2_of(c);
  a << " --imax " << s.ij[0] << " --jmax " << s.ij[1];
  if (bi) a << " --i2max " << s.ij[2] << " --j2max " << s.ij[3];
  a << " --case " << s.label << " --tolerance " << fmt(c.tolerance) << " --trial-seed " << trial;
  return a.str();
}

std::vector<CaseSpec> cases_for(const RunConfig& c, bool bi) {
  const bool replay = c.trial_seed.has_value();
  auto range = [&](const std::string& tag, int cap) {
    std::vector<int> r;
    if (tag != "c") return std::vector<int>{0};
    for (int x = replay ? cap : 0; x <= cap; ++x) r.push_back(x);
    return r;
  };
  std::vector<CaseSpec> out;
  if (!bi) {
    for (const std::string tag : {"c", "n", "n*"})
      for (int i : range(tag, c.imax))
        for (int j : range(tag, c.jmax)) out.push_back({long_label(tag), {tag}, {i, j}});
  } else {
    for (const std::string t1 : {"c", "n", "n*"})
      for (const std::string t2 : {"c", "n", "n*"})
        for (int i1 : range(t1, c.imax))
          for (int j1 : range(t1, c.jmax))
            for (int i2 : range(t2, i2_of(c)))
              for (int j2 : range(t2, j2_of(c))) out.push_back({t1 + "/" + t2, {t1, t2}, {i1, j1, i2, j2}});
  }
  if (!c.only_case.empty())
    out.erase(std::remove_if(out.begin(), out.end(), [&](const CaseSpec& s) { return s.label != c.only_case; }),
              out.end());
  return out;
}

// Residual and term count of one trial.
std::pair<double, std::size_t> identity_trial(const RunConfig& c, const CaseSpec& s, std::uint64_t trial) {
  Rng rng(trial);
  if (s.tags.size() == 1) {
    const Grid g = grid_of(c.d, c.N);
    const auto op = make_shift(g, s.tags[0], s.ij[0], s.ij[1], rng());
    const auto b = random_function(g, rng);
    const auto t = decompose(b, op);
    return {verify_identity(t, op, 1, rng(), c.tolerance).max_residual, t.size()};
  }
  const ProductGrid pg{grid_of(c.d, c.N), grid_of(c.d2, n2_of(c))};
  const auto s1 = make_shift(pg.first, s.tags[0], s.ij[0], s.ij[1], rng());
  const auto s2 = make_shift(pg.second, s.tags[1], s.ij[2], s.ij[3], rng());
  const auto b = random_function(pg, rng);
  const auto t = decompose_biparam(b, s1, s2);
  return {verify_identity(t, s1, s2, 1, rng(), c.tolerance).max_residual, t.size()};
}

void identity_suite(const RunConfig& c, bool bi, Collector& col, Json& summary) {
  const auto cases = cases_for(c, bi);
  double worst = 0.0;
  std::size_t failed = 0;
  const int m1 = cancellative_count_constant(c.d);
  const int constant = bi ? m1 * cancellative_count_constant(c.d2) : m1;
  for (const CaseSpec& s : cases) {
    const std::uint64_t base = case_seed(c, s);
    const int trials = c.trial_seed ? 1 : c.trials;
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t)
      seeds[static_cast<std::size_t>(t)] = c.trial_seed ? *c.trial_seed : derive_seed(base, static_cast<std::uint64_t>(t));
    std::vector<double> res(seeds.size());
    std::vector<std::size_t> counts(seeds.size());
    parallel_for(seeds.size(), c.threads, [&](std::size_t t) {
      std::tie(res[t], counts[t]) = identity_trial(c, s, seeds[t]);
    });
    const auto at = std::max_element(res.begin(), res.end()) - res.begin();
    const double max_res = res[static_cast<std::size_t>(at)];
    const std::uint64_t worst_seed = seeds[static_cast<std::size_t>(at)];
    double bound = constant * (1.0 + std::max(s.ij[0], s.ij[1]));
    if (bi) bound *= 1.0 + std::max(s.ij[2], s.ij[3]);
    const bool count_ok = static_cast<double>(counts.front()) <= bound;
    const bool pass = max_res < c.tolerance && count_ok;
    Json row = {{"suite", bi ? "bi" : "one"}, {"case", s.label}, {"d", c.d}, {"N", c.N}};
    if (bi) {
      row["d2"] = c.d2;
      row["N2"] = n2_of(c);
    }
    row["i"] = s.ij[0];
    row["j"] = s.ij[1];
    if (bi) {
      row["i2"] = s.ij[2];
      row["j2"] = s.ij[3];
    }
    row["term_count"] = counts.front();
    row["term_bound"] = bound;
    row["trials"] = trials;
    row["max_residual"] = max_res;
    row["tolerance"] = c.tolerance;
    row["pass"] = pass;
    row["replay_seed"] = worst_seed;
    col.rows.push_back(row);
    worst = std::max(worst, max_res);
    if (!pass) {
      ++failed;
      col.fail(s.label + (count_ok ? " residual " + fmt(max_res) : " term count above bound"), worst_seed,
               replay_args(c, s, worst_seed));
    }
  }
  summary[bi ? "bi" : "one"] = {{"cases", cases.size()},
                                {"failed", failed},
                                {"max_residual", worst},
                                {"term_constant", constant}};
}

void same_cube_suite(const RunConfig& c, Collector& col, Json& summary) {
  double worst = 0.0;
  for (const std::string tag : {"n", "n*"}) {
    const std::string label = "same-cube-" + std::string(tag == "n" ? "analysis" : "synthesis");
    if (!c.only_case.empty() && c.only_case != label) continue;
    const std::uint64_t seed = c.trial_seed ? *c.trial_seed : derive_seed(c.seed, tag_seed(label));
    const double r = same_cube_residual(make_shift(grid_of(c.d, c.N), tag, 0, 0, seed));
    const bool pass = r < c.cube_tolerance;
    col.rows.push_back({{"suite", "same-cube"}, {"case", label}, {"d", c.d}, {"N", c.N}, {"max_residual", r},
                        {"tolerance", c.cube_tolerance}, {"pass", pass}, {"replay_seed", seed}});
    worst = std::max(worst, r);
    if (!pass)
      col.fail(label + " residual " + fmt(r), seed,
               "verify-decomp --suite one --d " + std::to_string(c.d) + " --N " + std::to_string(c.N) + " --case " +
                   label + " --trial-seed " + std::to_string(seed));
  }
  summary["same_cube"] = {{"max_residual", worst}};
}

void verify_decomp(const RunConfig& c, Collector& col, Json& summary) {
  if (c.suite != "bi") {
    identity_suite(c, false, col, summary);
    same_cube_suite(c, col, summary);
  }
  if (c.suite != "one") identity_suite(c, true, col, summary);
}

// ------------------------------------------------------------------- norm-study

void norm_study(const RunConfig& c, Collector& col, Json& summary) {
  StudyConfig s;
  s.kind = c.kind;
  s.d = c.d;
  s.N = c.N;
  s.k_max = c.kmax;
  s.l_max = c.lmax;
  s.trials = c.trials;
  s.seed = c.seed;
  s.threads = c.threads;
  const bool exact = c.kind == "Bk" || c.kind == "Sk";
  double worst = 0.0;
  for (const NormReport& r : uniformity_study(s)) {
    Json row = Json::parse(to_json_line(r));
    worst = std::max(worst, r.max_ratio);
    if (exact) {
      const bool pass = r.max_ratio <= 1.0 + c.bound_tolerance;
      row["bound"] = 1.0;
      row["pass"] = pass;
      if (!pass)
        col.fail(c.kind + " k=" + std::to_string(r.k) + " ratio " + fmt(r.max_ratio), c.seed,
                 "norm-study --kind " + c.kind + " --d " + std::to_string(c.d) + " --N " + std::to_string(c.N) +
                     " --kmax " + std::to_string(r.k) + " --trials " + std::to_string(c.trials) + " --seed " +
                     std::to_string(c.seed));
    }
    col.rows.push_back(row);
  }
  summary["max_ratio"] = worst;
  summary["asserted_bound"] = exact ? Json(1.0) : Json(nullptr);
}

// --------------------------------------------------------------------- jn-check

void jn_study(const RunConfig& c, Collector& col, Json& summary) {
  const Grid g = grid_of(c.d, c.N);
  const int top = std::min(2, c.N - 1);
  const int trials = c.trial_seed ? 1 : c.trials;
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < trials; ++t)
    seeds.push_back(c.trial_seed ? *c.trial_seed : derive_seed(c.seed, tag_seed("jn"), static_cast<std::uint64_t>(t)));
  double worst_all = 0.0;
  for (double p : c.p) {
    std::vector<double> worst(seeds.size(), 0.0);
    parallel_for(seeds.size(), c.threads, [&](std::size_t t) {
      Rng rng(seeds[t]);
      const auto a = random_function(g, rng);
      for (int k = 0; k <= top; ++k)
        for (std::size_t q = 0; q < g.cubes_at(k); ++q) worst[t] = std::max(worst[t], jn_check(a, {k, q}, p));
    });
    const auto at = static_cast<std::size_t>(std::max_element(worst.begin(), worst.end()) - worst.begin());
    double ceiling = p == 2.0 ? 1.0 : (c.d == 1 ? jn_ceiling(p) : std::numeric_limits<double>::quiet_NaN());
    const bool asserted = !std::isnan(ceiling);
    const double slack = p == 2.0 ? c.bound_tolerance : 0.0;
    const bool pass = !asserted || worst[at] <= ceiling + slack;
    col.rows.push_back({{"p", p},
                        {"d", c.d},
                        {"N", c.N},
                        {"levels", top + 1},
                        {"trials", trials},
                        {"max_ratio", worst[at]},
                        {"ceiling", asserted ? Json(ceiling) : Json(nullptr)},
                        {"pass", pass},
                        {"replay_seed", seeds[at]}});
    worst_all = std::max(worst_all, worst[at]);
    if (!pass)
      col.fail("jn p=" + fmt(p) + " ratio " + fmt(worst[at]), seeds[at],
               "jn-check --d " + std::to_string(c.d) + " --N " + std::to_string(c.N) + " --p " + fmt(p) +
                   " --trial-seed " + std::to_string(seeds[at]));
  }
  summary["max_ratio"] = worst_all;
}

// ---------------------------------------------------------------------- mc-demo

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index x = 0; x < m.cols(); ++x) row[static_cast<std::size_t>(x)] = m(r, x);
    rows.push_back(row);
  }
  return rows;
}

Json symmetry_json(const std::string& name, const SymmetryTest& t, bool expect_pass) {
  return {{"test", name},
          {"entries", t.entries},
          {"exceed", t.exceed},
          {"expected_exceed", t.expected_exceed},
          {"max_z", t.max_z},
          {"max_exact_dev", t.max_exact_dev},
          {"expected", expect_pass ? "pass" : "fail"},
          {"pass", t.pass == expect_pass}};
}

void mc_demo(const RunConfig& c, Collector& col, Json& summary, Json& extra) {
  const auto demo = representation_demo(c.N, c.samples, c.seed, c.threads);
  const auto toe = toeplitz_test(demo.average.mean, demo.average.stderr_, c.sigmas);
  const auto anti = antisymmetry_test(demo.symmetrised.mean, demo.symmetrised.stderr_, c.sigmas);
  const auto single = demo.single_toeplitz;
  col.rows.push_back(symmetry_json("toeplitz", toe, true));
  col.rows.push_back(symmetry_json("antisymmetry", anti, true));
  col.rows.push_back(symmetry_json("single_sample_toeplitz", single, false));
  const std::string args = "mc-demo --N " + std::to_string(c.N) + " --samples " + std::to_string(c.samples) +
                           " --sigmas " + fmt(c.sigmas) + " --seed " + std::to_string(c.seed);
  if (!toe.pass) col.fail("averaged operator is not Toeplitz", c.seed, args);
  if (!anti.pass) col.fail("averaged operator is not antisymmetric", c.seed, args);
  if (single.pass) col.fail("a single grid already passes the Toeplitz test", c.seed, args);
  summary = {{"samples", demo.average.samples}, {"skipped", demo.average.skipped}, {"sigmas", c.sigmas}};
  extra["mean"] = matrix_json(demo.average.mean);
  extra["stderr"] = matrix_json(demo.average.stderr_);
}

// ------------------------------------------------------------------ bound-study

void bound_study(const RunConfig& c, Collector& col, Json& summary) {
  const Grid g = grid_of(1, c.N);
  auto args = [&](int i, int j, std::uint64_t s) {
    return "bound-study --N " + std::to_string(c.N) + " --imax " + std::to_string(i) + " --jmax " +
           std::to_string(j) + " --ratio-ceiling " + fmt(c.ratio_ceiling) + " --trial-seed " + std::to_string(s);
  };
  double max_ratio = 0.0;
  if (c.trial_seed) {
    const double norm = commutator_trial_norm(g, c.imax, c.jmax, *c.trial_seed);
    max_ratio = norm / (1.0 + std::max(c.imax, c.jmax));
    col.rows.push_back({{"i", c.imax}, {"j", c.jmax}, {"trials", 1}, {"sup_norm", norm}, {"ratio", max_ratio},
                        {"replay_seed", *c.trial_seed}});
    if (max_ratio > c.ratio_ceiling) col.fail("ratio " + fmt(max_ratio), *c.trial_seed, args(c.imax, c.jmax, *c.trial_seed));
  } else {
    const auto study = commutator_bound_study(c.delta, c.imax, c.jmax, c.trials, c.seed, c.N, c.threads);
    for (std::size_t x = 0; x < study.reports.size(); ++x) {
      const auto& r = study.reports[x];
      col.rows.push_back({{"i", r.i}, {"j", r.j}, {"trials", r.trials}, {"sup_norm", study.sup_norms[x]},
                          {"ratio", r.max_ratio}, {"replay_seed", study.worst_seeds[x]}});
      if (r.max_ratio > c.ratio_ceiling)
        col.fail("(i, j) = (" + std::to_string(r.i) + ", " + std::to_string(r.j) + ") ratio " + fmt(r.max_ratio),
                 study.worst_seeds[x], args(r.i, r.j, study.worst_seeds[x]));
    }
    max_ratio = study.max_ratio;
    summary["weighted_total"] = study.weighted_total;
  }
  const int cap = std::max(c.imax, c.jmax);
  // Closed form against a truncation whose tail is provably below 1e-12.
  int deep = cap;
  while (geometric_tail_bound(c.delta, deep) > 1e-12 && deep < 1000000) deep = deep < 16 ? 16 : deep * 2;
  const double truncated = geometric_constant(c.delta, deep), limit = geometric_constant_limit(c.delta);
  const bool series_ok = std::abs(truncated - limit) <= 1e-10;
  if (!series_ok) col.fail("geometric series cross-check " + fmt(std::abs(truncated - limit)), c.seed, "bound-study");
  summary["delta"] = c.delta;
  summary["cap"] = cap;
  summary["geometric_constant"] = geometric_constant(c.delta, cap);
  summary["geometric_constant_limit"] = limit;
  summary["tail_bound"] = geometric_tail_bound(c.delta, cap);
  summary["series_check"] = {{"cap", deep}, {"truncated", truncated}, {"difference", std::abs(truncated - limit)},
                             {"tolerance", 1e-10}, {"pass", series_ok}};
  summary["max_ratio"] = max_ratio;
  summary["ratio_ceiling"] = c.ratio_ceiling;
}

// --------------------------------------------------------------------- selftest

void selftest(const RunConfig& c, Collector& col, Json& summary) {
  const Grid g = grid_of(c.d, c.N);
  const int trials = std::min(c.trials, 20);
  auto trial_rng = [&](const char* check, int t) {
    return Rng(derive_seed(c.seed, tag_seed(check), static_cast<std::uint64_t>(t)));
  };
  auto record = [&](const std::string& check, double value, double tol) {
    const bool pass = value < tol;
    col.rows.push_back({{"check", check}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
    if (!pass)
      col.fail(check + " " + fmt(value), c.seed,
               "selftest --d " + std::to_string(c.d) + " --N " + std::to_string(c.N) + " --seed " +
                   std::to_string(c.seed));
    summary[check] = value;
  };
  const double tol = c.algebra_tolerance;

  {  // at most 256 basis functions, spread evenly over the slots
    const std::size_t n = g.size(), take = std::min<std::size_t>(n, 256);
    std::vector<DyadicFunction> basis;
    for (std::size_t x = 0; x < take; ++x) {
      const std::size_t slot = x * n / take;
      basis.push_back(haar_function(g, haar_index_at(g, slot)));
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = a; b < basis.size(); ++b)
        worst = std::max(worst, std::abs(inner_product(basis[a], basis[b]) - (a == b ? 1.0 : 0.0)));
    record("orthonormality", worst, tol);
  }

  double parseval = 0.0, roundtrip = 0.0, coeff_roundtrip = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng("parseval", t);
    const auto f = random_function(g, rng);
    const auto cf = haar_forward(f);
    const double n2 = l2_norm(f) * l2_norm(f);
    parseval = std::max(parseval, std::abs(cf.values().squaredNorm() - n2) / n2);
    roundtrip = std::max(roundtrip, (haar_inverse(cf).samples() - f.samples()).norm() / f.samples().norm());
    HaarCoefficients r(g);
    std::normal_distribution<> normal;
    for (Eigen::Index i = 0; i < r.values().size(); ++i) r.values()[i] = normal(rng);
    coeff_roundtrip =
        std::max(coeff_roundtrip, (haar_forward(haar_inverse(r)).values() - r.values()).norm() / r.values().norm());
  }
  record("parseval", parseval, tol);
  record("roundtrip", roundtrip, tol);
  record("coefficient_roundtrip", coeff_roundtrip, tol);

  double shift_adj = 0.0, p_adj = 0.0, form_adj = 0.0, mean_inv = 0.0;
  const int cap = std::min(2, c.N - 1);
  for (int t = 0; t < trials; ++t) {
    Rng rng = trial_rng("duality", t);
    const std::vector<ShiftOperator> shifts = {
        random_shift(g, cap, std::min(1, cap), rng()),
        random_shift(g, 0, 0, rng(), ShiftKind::noncancellative, Orientation::analysis),
        random_shift(g, 0, 0, rng(), ShiftKind::noncancellative, Orientation::synthesis)};
    const auto f = random_function(g, rng), h = random_function(g, rng), b = random_function(g, rng);
    const double scale = l2_norm(f) * l2_norm(h);
    for (const auto& s : shifts) {
      shift_adj = std::max(shift_adj,
                           std::abs(inner_product(apply_shift(s, f), h) - inner_product(f, apply_shift(adjoint(s), h))) /
                               scale);
      const auto base = commutator(b, s, f);
      const auto moved = commutator(b + DyadicFunction::constant(g, 3.5), s, f);
      mean_inv = std::max(mean_inv, l2_norm(moved - base) / (b.samples().cwiseAbs().maxCoeff() * l2_norm(f)));
    }
    const auto a = random_function(g, rng);
    p_adj = std::max(p_adj, std::abs(inner_product(apply_P(b, a, f), h) - inner_product(f, apply_P_adjoint(b, a, h))) /
                                scale);
    const int k = std::min(1, c.N - 1);
    const Signature top = g.cancellative_count() - 1;
    const Form form = BkOperator{k, top, 0, top, haar_product_beta(g, k, top)};
    const double lhs = apply_form(g, form, b.samples(), f.samples()).dot(h.samples());
    const double rhs = f.samples().dot(apply_form(g, transpose(form), b.samples(), h.samples()));
    form_adj = std::max(form_adj, std::abs(lhs - rhs) / (f.samples().norm() * h.samples().norm()));
  }
  record("shift_adjoint", shift_adj, tol);
  record("P_adjoint", p_adj, tol);
  record("form_transpose", form_adj, tol);
  record("commutator_mean_invariance", mean_inv, tol);

  {  // PP1 is the partial transpose of PP in variable 1, checked densely on a small product grid
    const int m = std::min(c.N, 3);
    const ProductGrid pg{grid_of(1, m), grid_of(1, m)};
    Rng rng = trial_rng("partial_adjoint", 0);
    BiparamSpec pp, pp1;
    pp.kind = BiparamKind::PP;
    pp1.kind = BiparamKind::PP1;
    pp.symbol = pp1.symbol = random_function(pg, rng);
    const auto b = random_function(pg, rng);
    const auto n1 = static_cast<Eigen::Index>(pg.first.size()), n2 = static_cast<Eigen::Index>(pg.second.size());
    Eigen::MatrixXd A(n1 * n2, n1 * n2), A1(n1 * n2, n1 * n2);
    for (Eigen::Index col_ = 0; col_ < n1 * n2; ++col_) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n1, n2);
      e.data()[col_] = 1.0;
      const ProductFunction ef(pg, e);
      A.col(col_) = apply_biparam(pp, b, ef).samples().reshaped();
      A1.col(col_) = apply_biparam(pp1, b, ef).samples().reshaped();
    }
    Eigen::MatrixXd At(n1 * n2, n1 * n2);
    for (Eigen::Index r1 = 0; r1 < n1; ++r1)
      for (Eigen::Index c1 = 0; c1 < n2; ++c1)
        for (Eigen::Index r2 = 0; r2 < n1; ++r2)
          for (Eigen::Index c2 = 0; c2 < n2; ++c2) At(r2 + n1 * c1, r1 + n1 * c2) = A(r1 + n1 * c1, r2 + n1 * c2);
    record("PP_partial_adjoint", (A1 - At).norm() / std::max(At.norm(), 1e-300), tol);
  }

  {
    double worst = 0.0;
    const int top = std::min(2, c.N - 1);
    for (int t = 0; t < trials; ++t) {
      Rng rng = trial_rng("jn", t);
      const auto a = random_function(g, rng);
      for (int k = 0; k <= top; ++k)
        for (std::size_t q = 0; q < g.cubes_at(k); ++q) worst = std::max(worst, jn_check(a, {k, q}, 2.0));
    }
    const bool pass = worst <= 1.0 + c.bound_tolerance;
    col.rows.push_back({{"check", "jn_p2"}, {"value", worst}, {"tolerance", 1.0}, {"pass", pass}});
    summary["jn_p2"] = worst;
    if (!pass) col.fail("jn_check(p=2) " + fmt(worst), c.seed, "selftest --seed " + std::to_string(c.seed));
  }
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json j = {{"command", c.command},
            {"d", c.d},
            {"N", c.N},
            {"d2", c.d2},
            {"N2", c.N2},
            {"imax", c.imax},
            {"jmax", c.jmax},
            {"i2max", c.i2max},
            {"j2max", c.j2max},
            {"kmax", c.kmax},
            {"lmax", c.lmax},
            {"delta", c.delta},
            {"trials", c.trials},
            {"samples", c.samples},
            {"seed", c.seed},
            {"trial_seed", c.trial_seed ? Json(*c.trial_seed) : Json(nullptr)},
            {"suite", c.suite},
            {"case", c.only_case},
            {"kind", c.kind},
            {"p", c.p},
            {"out", c.out},
            {"format", c.format},
            {"threads", c.threads},
            {"tolerance", c.tolerance},
            {"cube_tolerance", c.cube_tolerance},
            {"algebra_tolerance", c.algebra_tolerance},
            {"bound_tolerance", c.bound_tolerance},
            {"sigmas", c.sigmas},
            {"ratio_ceiling", c.ratio_ceiling}};
  return j;
}

RunConfig config_from_json(const Json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "d") c.d = v.get<int>();
      else if (key == "N") c.N = v.get<int>();
      else if (key == "d2") c.d2 = v.get<int>();
      else if (key == "N2") c.N2 = v.get<int>();
      else if (key == "imax") c.imax = v.get<int>();
      else if (key == "jmax") c.jmax = v.get<int>();
      else if (key == "i2max") c.i2max = v.get<int>();
      else if (key == "j2max") c.j2max = v.get<int>();
      else if (key == "kmax") c.kmax = v.get<int>();
      else if (key == "lmax") c.lmax = v.get<int>();
      else if (key == "delta") c.delta = v.get<double>();
      else if (key == "trials") c.trials = v.get<int>();
      else if (key == "samples") c.samples = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "trial_seed") c.trial_seed = v.is_null() ? std::nullopt : std::optional(v.get<std::uint64_t>());
      else if (key == "suite") c.suite = v.get<std::string>();
      else if (key == "case") c.only_case = v.get<std::string>();
      else if (key == "kind") c.kind = v.get<std::string>();
      else if (key == "p") c.p = v.get<std::vector<double>>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "tolerance") c.tolerance = v.get<double>();
      else if (key == "cube_tolerance") c.cube_tolerance = v.get<double>();
      else if (key == "algebra_tolerance") c.algebra_tolerance = v.get<double>();
      else if (key == "bound_tolerance") c.bound_tolerance = v.get<double>();
      else if (key == "sigmas") c.sigmas = v.get<double>();
      else if (key == "ratio_ceiling") c.ratio_ceiling = v.get<double>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  need(one_of(c.command, kCommands), "unknown command '" + c.command + "'");
  need(c.d >= 1 && c.d <= 4 && c.N >= 1 && c.d * c.N <= 16, "need 1 <= d <= 4, N >= 1 and d * N <= 16");
  need(c.trials > 0 && c.samples > 0, "trials and samples must be positive");
  need(c.threads >= 1, "threads must be at least 1");
  need(c.format == "json" || c.format == "csv", "format must be json or csv");
  need(c.tolerance > 0 && c.cube_tolerance > 0 && c.algebra_tolerance > 0 && c.bound_tolerance >= 0,
       "tolerances must be positive");
  need(c.delta > 0 && c.sigmas > 0 && c.ratio_ceiling > 0, "delta, sigmas and ratio_ceiling must be positive");
  need(c.imax >= 0 && c.jmax >= 0 && c.kmax >= 0 && c.lmax >= 0, "caps must be non-negative");
  if (c.command == "verify-decomp") {
    need(c.suite == "one" || c.suite == "bi" || c.suite == "all", "suite must be one, bi or all");
    need(c.imax < c.N && c.jmax < c.N, "verify-decomp needs imax, jmax < N");
    if (c.suite != "one") {
      const int n2 = n2_of(c);
      need(c.d2 >= 1 && c.d2 <= 4 && n2 >= 1 && c.d2 * n2 <= 16, "need 1 <= d2 <= 4 and d2 * N2 <= 16");
      need(c.d * c.N + c.d2 * n2 <= 16, "bi-parameter grids are limited to 2^16 samples");
      need(i2_of(c) < n2 && j2_of(c) < n2, "verify-decomp needs i2max, j2max < N2");
    }
    need(!c.trial_seed || !c.only_case.empty(), "--trial-seed needs --case");
  }
  if (c.command == "norm-study") {
    need(one_of(c.kind, kKinds), "unknown norm-study kind '" + c.kind + "'");
    need(c.kmax < c.N && c.lmax < c.N, "norm-study needs kmax, lmax < N");
  }
  if (c.command == "jn-check") {
    need(!c.p.empty(), "jn-check needs at least one p");
    for (double p : c.p) need(p >= 1.0, "jn-check needs p >= 1");
  }
  if (c.command == "mc-demo") need(c.d == 1 && c.N >= 2, "mc-demo runs at d = 1 with N >= 2");
  if (c.command == "bound-study") need(c.d == 1 && std::max(c.imax, c.jmax) < c.N, "bound-study runs at d = 1 with imax, jmax < N");
}

RunReport run(const RunConfig& c) {
  validate(c);
  Collector col;
  Json summary = Json::object(), extra = Json::object();
  if (c.command == "verify-decomp") verify_decomp(c, col, summary);
  else if (c.command == "norm-study") norm_study(c, col, summary);
  else if (c.command == "jn-check") jn_study(c, col, summary);
  else if (c.command == "mc-demo") mc_demo(c, col, summary, extra);
  else if (c.command == "bound-study") bound_study(c, col, summary);
  else selftest(c, col, summary);

  RunReport r;
  r.pass = col.failures.empty();
  r.failures = col.failures;
  r.replay_seed = col.replay_seed;
  r.replay_args = col.replay_args;
  Json report = {{"command", c.command}, {"config", to_json(c)}, {"summary", summary}, {"results", col.rows}};
  for (const auto& [k, v] : extra.items()) report[k] = v;
  report["pass"] = r.pass;
  report["failures"] = col.failures;
  report["replay_seed"] = r.replay_seed ? Json(*r.replay_seed) : Json(nullptr);
  r.report = std::move(report);
  return r;
}

std::string render(const RunReport& r, const RunConfig& c) {
  if (c.format == "json") return r.report.dump(2) + "\n";
  std::ostringstream out;
  out << "# config: " << r.report.at("config").dump() << "\n";
  if (c.command == "mc-demo") {
    AverageResult a;
    const auto mean = r.report.at("mean").get<std::vector<std::vector<double>>>();
    const auto err = r.report.at("stderr").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(mean.size());
    a.mean.resize(n, n);
    a.stderr_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index x = 0; x < n; ++x) {
        a.mean(i, x) = mean[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
        a.stderr_(i, x) = err[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
      }
    write_matrix_csv(out, a);
    return out.str();
  }
  std::vector<std::string> keys;
  for (const Json& row : r.report.at("results"))
    for (const auto& [k, v] : row.items())
      if (!one_of(k, keys)) keys.push_back(k);
  for (std::size_t x = 0; x < keys.size(); ++x) out << (x ? "," : "") << keys[x];
  out << "\n";
  for (const Json& row : r.report.at("results")) {
    for (std::size_t x = 0; x < keys.size(); ++x) {
      if (x) out << ",";
      if (!row.contains(keys[x]) || row.at(keys[x]).is_null()) continue;
      const Json& v = row.at(keys[x]);
      out << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace dyadic
