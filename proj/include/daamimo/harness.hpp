#ifndef DAAMIMO_HARNESS_HPP
#define DAAMIMO_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "daamimo/power.hpp"
#include "daamimo/scenario.hpp"

namespace daamimo {

struct SweepPoint {
  int M = 0;
  int N = 0;
};

// One experiment: a base scenario whose per-cell array list is the activation
// order, a list of (M, N) sweep points realized by truncating that list to
// the first N arrays, and the schemes to evaluate at each point.
struct ExperimentSpec {
  ScenarioConfig base;
  std::vector<SweepPoint> sweep;
  bool scheme_equal = true;
  bool scheme_maxmin = false;
  long mc_draws = 0;  // 0 disables the Monte-Carlo cross-check columns
  std::uint64_t master_seed = 1;
  BisectionParams bisection;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SweepRow {
  SweepPoint point;
  std::string scheme;  // "equal" or "maxmin"
  SinrReport report;
  std::vector<double> cell_power;
  bool power_pass = false;
  double gamma_star = 0.0;  // maxmin only
  std::vector<BisectionStep> trace;
  bool solver_ok = true;
  std::string note;
  MonteCarloReport mc;
  bool has_mc = false;
};

struct RunResult {
  std::vector<SweepRow> rows;
  bool all_ok = true;  // every row solved and passed its power check
};

// Runs the sweep in input order. Per-point Monte-Carlo seeds are derived from
// (master_seed, point index, scheme index), so the output is a pure function
// of the spec. Solver failures are recorded on their row without aborting.
RunResult run_sweep(const ExperimentSpec& spec);

// Writes results.csv, manifest.json, and one bisection trace CSV per maxmin
// row into the directory (created if missing). Identical (spec, results)
// produce byte-identical files.
void export_results(const RunResult& result, const ExperimentSpec& spec, const std::string& dir);

// The results.csv column list, also embedded in the manifest.
const std::vector<std::string>& results_csv_schema();

}  // namespace daamimo

#endif
