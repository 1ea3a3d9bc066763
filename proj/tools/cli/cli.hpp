#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cks/json_io.hpp"

namespace cks::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kValidation = 2,
  kTailNotCertified = 3,
  kBoundFailure = 4,
};

/// Everything a run depends on. Unset optionals fall back to per-command
/// defaults, so two equal configs always produce byte-identical output.
struct RunConfig {
  std::string command;
  /// Check or table selected under verify / envelopes.
  std::string action;

  std::string family = "constant";
  double beta = 0.5;
  int k = 2;
  std::optional<int> n_max;
  std::vector<double> log_values;

  std::optional<int> d;
  std::vector<double> lambda;
  int p = 1;
  int q = 0;
  std::optional<double> a;

  int directions = 10;
  int phases = 16;
  int radii = 8;
  double max_radius = 2.0;
  std::uint64_t grid_seed = 20240601;
  bool refine = true;

  std::string phi;
  std::uint64_t seed = 1;
  int degree = 3;
  int nnz = 6;
  std::string mode = "test";
  double k_scale = 1.0;
  int lemma_directions = 4;

  std::string egf = "alpha";
  std::string table = "grid";
  std::vector<double> r;
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::optional<int> r_points;
  int n_lo = 1;
  int n_hi = 100;

  std::vector<std::string> conditions;
  int window_lo = 0;
  int window_hi = 300;
  bool implications = false;

  double x_max = 5.0;
  int x_points = 11;

  double gap_tolerance = 1e-10;
  double tail_tolerance = 1e-12;

  std::string out;
  std::string format = "json";
};

Json to_json(const RunConfig& cfg);
/// Overrides the fields named in j (keys use the long flag spelling without dashes).
/// Unknown keys are rejected with ValidationError.
void apply_config(const Json& j, RunConfig& cfg);

/// n_max used when neither --n-max nor the config sets one: CKS_NMAX if present,
/// else fallback.
int default_n_max(int fallback);

/// Parses args (without the program name), runs the command and writes the report
/// to out (or --out). Diagnostics go to err. Returns an ExitCode.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace cks::cli
