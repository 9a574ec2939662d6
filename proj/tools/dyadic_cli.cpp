// Command-line entry point: dyadic_cli <command> [flags]
//
// Exit codes: 0 all assertions pass, 1 an assertion failed (the replay
// command is printed), 2 usage or configuration error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dyadic/runner.hpp"

namespace {

using dyadic::Json;
using dyadic::RunConfig;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Flag values land here; only flags given on the command line override the config.
struct Flags {
  RunConfig v;
  std::uint64_t trial_seed = 0;
  std::string config_path;
};

void add_flags(CLI::App& sub, Flags& f, std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>>& opts) {
  auto add = [&](const char* name, auto& field, const char* help, auto member) {
    CLI::Option* o = sub.add_option(name, field, help);
    opts.emplace_back(o, [&field, member](RunConfig& c) { c.*member = field; });
  };
  add("--d", f.v.d, "dimension of each cube (default 1)", &RunConfig::d);
  add("--N", f.v.N, "grid depth (default 6)", &RunConfig::N);
  add("--d2", f.v.d2, "dimension of the second variable (bi-parameter suite)", &RunConfig::d2);
  add("--N2", f.v.N2, "depth of the second variable, 0 = N", &RunConfig::N2);
  add("--imax", f.v.imax, "cap on i (default 4)", &RunConfig::imax);
  add("--jmax", f.v.jmax, "cap on j (default 4)", &RunConfig::jmax);
  add("--i2max", f.v.i2max, "cap on i in variable 2, -1 = imax", &RunConfig::i2max);
  add("--j2max", f.v.j2max, "cap on j in variable 2, -1 = jmax", &RunConfig::j2max);
  add("--kmax", f.v.kmax, "cap on k (norm-study)", &RunConfig::kmax);
  add("--lmax", f.v.lmax, "cap on l (bi-parameter norm-study kinds)", &RunConfig::lmax);
  add("--delta", f.v.delta, "decay exponent (default 1)", &RunConfig::delta);
  add("--trials", f.v.trials, "random trials per case (default 100)", &RunConfig::trials);
  add("--samples", f.v.samples, "random grids for mc-demo (default 10000)", &RunConfig::samples);
  add("--seed", f.v.seed, "master seed (default 7)", &RunConfig::seed);
  add("--suite", f.v.suite, "verify-decomp suite: one, bi or all", &RunConfig::suite);
  add("--case", f.v.only_case, "verify-decomp: only this case label", &RunConfig::only_case);
  add("--kind", f.v.kind, "norm-study kind: Bk Sk P Pstar Bkl BPk PBl PP PP1", &RunConfig::kind);
  add("--p", f.v.p, "jn-check exponents", &RunConfig::p);
  add("--out", f.v.out, "report path (default: $DYADIC_OUT_DIR/<command>.<format> or stdout)", &RunConfig::out);
  add("--format", f.v.format, "json or csv", &RunConfig::format);
  add("--threads", f.v.threads, "worker threads; results do not depend on it", &RunConfig::threads);
  add("--tolerance", f.v.tolerance, "decomposition residual tolerance (default 1e-9)", &RunConfig::tolerance);
  add("--cube-tolerance", f.v.cube_tolerance, "same-cube commutator tolerance (default 1e-12)",
      &RunConfig::cube_tolerance);
  add("--algebra-tolerance", f.v.algebra_tolerance, "selftest tolerance (default 1e-11)",
      &RunConfig::algebra_tolerance);
  add("--bound-tolerance", f.v.bound_tolerance, "relative slack on exact bounds (default 1e-12)",
      &RunConfig::bound_tolerance);
  add("--sigmas", f.v.sigmas, "mc-demo threshold in standard errors (default 3)", &RunConfig::sigmas);
  add("--ratio-ceiling", f.v.ratio_ceiling, "bound-study ceiling on the normalized commutator ratio",
      &RunConfig::ratio_ceiling);
  CLI::Option* ts = sub.add_option("--trial-seed", f.trial_seed, "replay a single trial");
  opts.emplace_back(ts, [&f](RunConfig& c) { c.trial_seed = f.trial_seed; });
  sub.add_option("--config", f.config_path, "JSON config; flags override it")->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic shift commutator experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> opts;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"verify-decomp", "check the commutator decompositions term by term"},
      {"norm-study", "uniformity and ratio sweeps of the model operators"},
      {"jn-check", "John-Nirenberg ratios"},
      {"mc-demo", "average a fixed-pattern shift over random grids"},
      {"bound-study", "normalized commutator norms and the geometric constant"},
      {"selftest", "orthonormality, Parseval and adjoint checks"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    // Every subcommand shares one flag set; options are registered once per subcommand.
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> local;
    add_flags(*sub, flags, local);
    for (auto& o : local) opts.push_back(std::move(o));
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    for (CLI::App* sub : subs)
      if (sub->parsed()) cfg.command = sub->get_name();
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw dyadic::ConfigError(std::string("cannot parse config: ") + e.what());
      }
      cfg = dyadic::config_from_json(j, cfg);
      cfg.command = app.get_subcommands().front()->get_name();
    }
    for (auto& [opt, apply] : opts)
      if (opt->count() > 0) apply(cfg);
    dyadic::validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::string path = cfg.out;
  if (path.empty())
    if (const char* dir = std::getenv("DYADIC_OUT_DIR"); dir && *dir)
      path = (std::filesystem::path(dir) / (cfg.command + "." + cfg.format)).string();

  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  dyadic::RunReport report;
  try {
    report = dyadic::run(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = dyadic::render(report, cfg);
  if (path.empty()) {
    std::cout << text;
  } else {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream(path, std::ios::binary) << text;
    const Json meta = {{"report", path},  {"command", cfg.command}, {"started_utc", started},
                       {"finished_utc", utc_now()}, {"elapsed_seconds", elapsed}, {"pass", report.pass}};
    std::ofstream(path + ".meta.json", std::ios::binary) << meta.dump(2) << "\n";
  }

  if (report.pass) {
    std::cerr << cfg.command << ": PASS (" << report.report.at("results").size() << " rows)\n";
    return 0;
  }
  std::cerr << cfg.command << ": FAIL\n";
  for (const auto& f : report.failures) std::cerr << "  " << f << "\n";
  std::cerr << "replay seed: " << *report.replay_seed << "\n";
  std::cerr << "replay: " << argv[0] << " " << report.replay_args << "\n";
  return 1;
}
