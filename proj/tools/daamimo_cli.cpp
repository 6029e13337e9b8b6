#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "daamimo/covariance.hpp"
#include "daamimo/harness.hpp"

namespace {

struct NetworkArgs {
  std::string scenario_file;
  int cells = 7;
  int users = 10;
  int arrays = 4;
  int antennas = 20;

  void attach(CLI::App& app) {
    app.add_option("--scenario", scenario_file, "scenario INI file (overrides the size flags)");
    app.add_option("--cells", cells, "number of cells")->check(CLI::PositiveNumber);
    app.add_option("--users", users, "users per cell")->check(CLI::PositiveNumber);
    app.add_option("--arrays", arrays, "arrays per cell")->check(CLI::PositiveNumber);
    app.add_option("--antennas", antennas, "antennas per array")->check(CLI::PositiveNumber);
  }

  daamimo::ScenarioConfig build() const {
    if (!scenario_file.empty()) return daamimo::load_scenario_file(scenario_file);
    daamimo::ScenarioConfig config;
    config.scenario = daamimo::build_ring_network(config.geometry, cells, users, arrays, antennas);
    return config;
  }
};

int cmd_run(const NetworkArgs& net, const std::vector<int>& Ms, const std::vector<int>& Ns,
            const std::vector<std::string>& schemes, long draws, std::uint64_t seed,
            double epsilon, const std::string& out_dir, bool assert_ok) {
  daamimo::ExperimentSpec spec;
  spec.base = net.build();
  spec.scheme_equal = false;
  spec.scheme_maxmin = false;
  for (const std::string& s : schemes) {
    if (s == "equal")
      spec.scheme_equal = true;
    else if (s == "maxmin")
      spec.scheme_maxmin = true;
    else
      throw CLI::ValidationError("--schemes", "unknown scheme '" + s + "' (expected equal|maxmin)");
  }
  const std::vector<int> ms = Ms.empty() ? std::vector<int>{spec.base.scenario.M} : Ms;
  const std::vector<int> ns = Ns.empty() ? std::vector<int>{spec.base.scenario.N} : Ns;
  for (int n : ns)
    for (int m : ms) spec.sweep.push_back({m, n});
  spec.mc_draws = draws;
  spec.master_seed = seed;
  spec.bisection.epsilon = epsilon;

  const daamimo::RunResult result = daamimo::run_sweep(spec);

  std::printf("%4s %3s %-7s %10s %10s %10s %9s %6s\n", "M", "N", "scheme", "sum SE", "min SE",
              "SINR*", "max power", "ok");
  for (const daamimo::SweepRow& row : result.rows) {
    if (!row.solver_ok) {
      std::printf("%4d %3d %-7s %10s %10s %10s %9s %6s  %s\n", row.point.M, row.point.N,
                  row.scheme.c_str(), "-", "-", "-", "-", "FAIL", row.note.c_str());
      continue;
    }
    double maxp = 0.0;
    for (double p : row.cell_power) maxp = std::max(maxp, p);
    char star[32] = "-";
    if (row.scheme == "maxmin") std::snprintf(star, sizeof star, "%.4f", row.gamma_star);
    const char* flag = row.power_pass ? "ok" : (row.scheme == "maxmin" ? "FAIL" : "over");
    std::printf("%4d %3d %-7s %10.4f %10.4f %10s %9.6f %6s\n", row.point.M, row.point.N,
                row.scheme.c_str(), row.report.sum_se, row.report.min_se, star, maxp, flag);
  }
  if (!out_dir.empty()) {
    daamimo::export_results(result, spec, out_dir);
    std::printf("wrote %s/results.csv and manifest.json\n", out_dir.c_str());
  }
  if (assert_ok && !result.all_ok) {
    std::fprintf(stderr, "run: at least one row failed its solve or power check\n");
    return 1;
  }
  return 0;
}

int cmd_covdump(const NetworkArgs& net, const std::string& out_file, bool verify) {
  const daamimo::ScenarioConfig config = net.build();
  const daamimo::CovarianceSet cov =
      daamimo::build_covariance_set(config.scenario, config.one_ring);
  if (verify) {
    const daamimo::CovarianceSet serial =
        daamimo::build_covariance_set_serial(config.scenario, config.one_ring);
    for (std::size_t idx = 0; idx < cov.size(); ++idx)
      if (cov.mat(idx).entries != serial.mat(idx).entries) {
        std::fprintf(stderr, "covdump: parallel and serial builds differ at index %zu\n", idx);
        return 1;
      }
    std::printf("parallel build matches the serial build bit for bit (%zu matrices)\n",
                cov.size());
  }
  if (!out_file.empty()) {
    {
      std::ofstream out(out_file, std::ios::binary);
      if (!out) throw std::runtime_error("covdump: cannot open " + out_file);
      daamimo::save_covariance_set(cov, out);
    }
    if (verify) {
      std::ifstream in(out_file, std::ios::binary);
      const daamimo::CovarianceSet back = daamimo::load_covariance_set(in);
      for (std::size_t idx = 0; idx < cov.size(); ++idx)
        if (cov.mat(idx).entries != back.mat(idx).entries) {
          std::fprintf(stderr, "covdump: file roundtrip differs at index %zu\n", idx);
          return 1;
        }
      std::printf("file roundtrip is exact\n");
    }
    std::printf("wrote %s\n", out_file.c_str());
  }
  return 0;
}

int cmd_socdump(const NetworkArgs& net, double gamma, const std::string& out_file) {
  const daamimo::ScenarioConfig config = net.build();
  const daamimo::CovarianceSet cov =
      daamimo::build_covariance_set(config.scenario, config.one_ring);
  const daamimo::EstimationSet est =
      daamimo::build_estimation_set(cov, config.scenario.rho_tr);
  const daamimo::SinrCoefficients coeffs = daamimo::compute_coefficients(cov, est);
  const daamimo::FeasibilityProblemSpec spec =
      daamimo::build_feasibility_problem(coeffs, est, gamma, config.scenario.sigma2);
  if (out_file.empty()) {
    daamimo::dump_program(spec.program, std::cout);
  } else {
    std::ofstream out(out_file);
    if (!out) throw std::runtime_error("socdump: cannot open " + out_file);
    daamimo::dump_program(spec.program, out);
    std::printf("wrote %s\n", out_file.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"downlink SINR simulator and max-min power optimizer"};
  app.require_subcommand(1);

  NetworkArgs net_run, net_cov, net_soc;

  auto* run = app.add_subcommand("run", "evaluate power schemes over an (M, N) sweep");
  net_run.attach(*run);
  std::vector<int> Ms, Ns;
  std::vector<std::string> schemes{"equal"};
  long draws = 0;
  std::uint64_t seed = 1;
  double epsilon = 1e-3;
  std::string out_dir;
  bool assert_ok = false;
  run->add_option("--Ms", Ms, "antenna counts to sweep (default: the scenario's M)");
  run->add_option("--Ns", Ns, "array counts to sweep (default: the scenario's N)");
  run->add_option("--schemes", schemes, "power schemes: equal, maxmin")->delimiter(',');
  run->add_option("--draws", draws, "Monte-Carlo draws per point (0 disables)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "master seed for Monte-Carlo runs");
  run->add_option("--epsilon", epsilon, "bisection SINR tolerance")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "directory for results.csv, manifest.json, traces");
  run->add_flag("--assert", assert_ok, "exit nonzero if any row fails its checks");

  auto* covdump = app.add_subcommand("covdump", "build covariance matrices, optionally to a file");
  net_cov.attach(*covdump);
  std::string cov_out;
  bool cov_verify = false;
  covdump->add_option("--out", cov_out, "binary output file");
  covdump->add_flag("--verify", cov_verify, "cross-check parallel vs serial and file roundtrip");

  auto* socdump = app.add_subcommand("socdump", "print the feasibility program for a SINR target");
  net_soc.attach(*socdump);
  double gamma = 1.0;
  std::string soc_out;
  socdump->add_option("--gamma", gamma, "SINR target")->check(CLI::PositiveNumber);
  socdump->add_option("--out", soc_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(net_run, Ms, Ns, schemes, draws, seed, epsilon, out_dir, assert_ok);
    if (covdump->parsed()) return cmd_covdump(net_cov, cov_out, cov_verify);
    if (socdump->parsed()) return cmd_socdump(net_soc, gamma, soc_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
