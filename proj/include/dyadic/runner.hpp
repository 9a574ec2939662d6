#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/io.hpp"

namespace dyadic {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ceiling for sup ||[b, S^{ij}] f|| / ((1 + max(i, j)) ||b||_BMO ||f||) on the
/// d = 1, N = 6, i, j <= 4 sweep. Twice the calibrated value.
inline constexpr double kCommutatorRatioCeiling = 1.55;

/// John-Nirenberg ratio ceilings for d = 1 at levels 0..2 (twice the calibrated
/// values); p = 2 is bounded by 1 by definition of the BMO norm.
double jn_ceiling(double p);

struct RunConfig {
  std::string command;  // verify-decomp, norm-study, jn-check, mc-demo, bound-study, selftest
  int d = 1;
  int N = 6;
  int d2 = 1;   // second variable of the bi-parameter suite
  int N2 = 0;   // 0: same as N
  int imax = 4;
  int jmax = 4;
  int i2max = -1;  // -1: same as imax
  int j2max = -1;  // -1: same as jmax
  int kmax = 4;
  int lmax = 0;
  double delta = 1.0;
  int trials = 100;
  int samples = 10000;
  std::uint64_t seed = 7;
  std::optional<std::uint64_t> trial_seed;  // replay one trial of the case given by the caps
  std::string suite = "one";                // verify-decomp: one, bi, all
  std::string only_case;                    // verify-decomp: restrict to one case label
  std::string kind = "Bk";                  // norm-study kind
  std::vector<double> p = {1.25, 1.5, 2.0, 3.0};
  std::string out;
  std::string format = "json";
  unsigned threads = 1;
  double tolerance = 1e-9;          // decomposition residual
  double cube_tolerance = 1e-12;    // same-cube commutators
  double algebra_tolerance = 1e-11; // selftest
  double bound_tolerance = 1e-12;   // relative slack on exact bounds
  double sigmas = 3.0;              // mc-demo
  double ratio_ceiling = kCommutatorRatioCeiling;
};

Json to_json(const RunConfig& c);
/// Keys as in to_json; unknown keys are a ConfigError.
RunConfig config_from_json(const Json& j, RunConfig base = {});
void validate(const RunConfig& c);

struct RunReport {
  Json report;  // {command, config, summary, results, pass, failures}
  bool pass = false;
  std::vector<std::string> failures;
  std::optional<std::uint64_t> replay_seed;
  std::string replay_args;  // arguments reproducing the first failure in isolation
};

/// Validates and runs one subcommand.
RunReport run(const RunConfig& c);

/// Report text in the configured format. CSV starts with a "# config:" line.
std::string render(const RunReport& r, const RunConfig& c);

}  // namespace dyadic
