#include "daamimo/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "daamimo/covariance.hpp"

namespace daamimo {

void ExperimentSpec::validate() const {
  base.scenario.validate();
  if (sweep.empty()) throw std::invalid_argument("experiment.sweep: must be nonempty");
  for (const SweepPoint& p : sweep) {
    if (p.M < 1) throw std::invalid_argument("experiment.sweep: M must be >= 1");
    if (p.N < 1 || p.N > base.scenario.N)
      throw std::invalid_argument("experiment.sweep: N must be in [1, base scenario N]");
  }
  if (!scheme_equal && !scheme_maxmin)
    throw std::invalid_argument("experiment.schemes: must select at least one scheme");
  if (mc_draws < 0) throw std::invalid_argument("experiment.mc_draws: must be >= 0");
}

namespace {

NetworkScenario truncated_scenario(const NetworkScenario& base, const SweepPoint& p) {
  NetworkScenario s = base;
  s.M = p.M;
  s.N = p.N;
  for (auto& arrays : s.array_positions) arrays.resize(static_cast<std::size_t>(p.N));
  s.validate();
  return s;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Notes land in a comma-separated file, so commas and newlines are rewritten.
std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

RunResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  RunResult result;

  for (std::size_t pi = 0; pi < spec.sweep.size(); ++pi) {
    const SweepPoint& point = spec.sweep[pi];
    const NetworkScenario scen = truncated_scenario(spec.base.scenario, point);
    const CovarianceSet cov = build_covariance_set(scen, spec.base.one_ring);
    const EstimationSet est = build_estimation_set(cov, scen.rho_tr);
    const SinrCoefficients coeffs = compute_coefficients(cov, est);

    const int scheme_count = 2;
    for (int si = 0; si < scheme_count; ++si) {
      const bool is_maxmin = si == 1;
      if (is_maxmin ? !spec.scheme_maxmin : !spec.scheme_equal) continue;
      SweepRow row;
      row.point = point;
      row.scheme = is_maxmin ? "maxmin" : "equal";

      PowerAllocation alloc(scen.L, scen.K, scen.N, 0.0);
      try {
        if (is_maxmin) {
          const MaxminResult mm = maxmin_power(coeffs, est, scen.sigma2, spec.bisection);
          alloc = mm.allocation;
          row.gamma_star = mm.gamma_star;
          row.trace = mm.trace;
        } else {
          alloc = equal_power(est);
        }
      } catch (const MaxminError& e) {
        row.solver_ok = false;
        row.note = e.what();
        result.all_ok = false;
        result.rows.push_back(std::move(row));
        continue;
      }

      row.report = closed_form_sinr(coeffs, alloc, scen.sigma2, scen.tau_c);
      const CellPowerReport powers = verify_power_constraint(alloc, est);
      row.cell_power = powers.cell_power;
      row.power_pass = powers.pass;
      // Equal power normalizes the network sum, which can overshoot single
      // cells on asymmetric layouts; that is reported, not treated as a
      // failure. Maxmin witnesses must respect every cell budget.
      if (!powers.pass && is_maxmin) result.all_ok = false;
      if (spec.mc_draws > 0) {
        row.mc = monte_carlo_sinr(cov, est, alloc, scen.sigma2, scen.tau_c, spec.mc_draws,
                                  derive_seed(spec.master_seed, pi, static_cast<std::uint64_t>(si)));
        row.has_mc = true;
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

const std::vector<std::string>& results_csv_schema() {
  static const std::vector<std::string> cols = {
      "M",         "N",      "scheme",     "row",        "cell",
      "user",      "gamma",  "se",         "mc_gamma",   "mc_gamma_stderr",
      "sum_se",    "min_se", "gamma_star", "cell_power", "power_pass",
      "solver_ok", "note"};
  return cols;
}

void export_results(const RunResult& result, const ExperimentSpec& spec, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream csv(fs::path(dir) / "results.csv");
    if (!csv) throw std::runtime_error("export_results: cannot write results.csv");
    const auto& cols = results_csv_schema();
    for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c];
    csv << "\n";
    for (const SweepRow& row : result.rows) {
      const std::string prefix = std::to_string(row.point.M) + "," + std::to_string(row.point.N) +
                                 "," + row.scheme + ",";
      if (row.solver_ok)
        for (int j = 0; j < row.report.L; ++j)
          for (int k = 0; k < row.report.K; ++k) {
            csv << prefix << "user," << j << ',' << k << ',' << fmt(row.report.gamma_at(j, k))
                << ',' << fmt(row.report.se_at(j, k)) << ',';
            if (row.has_mc) {
              const std::size_t u = static_cast<std::size_t>(j) * row.report.K + k;
              csv << fmt(row.mc.report.gamma[u]) << ',' << fmt(row.mc.gamma_stderr[u]);
            } else {
              csv << ',';
            }
            csv << ",,,," << fmt(row.cell_power[static_cast<std::size_t>(j)]) << ",,,\n";
          }
      csv << prefix << "summary,,,,,,,";
      if (row.solver_ok) {
        csv << fmt(row.report.sum_se) << ',' << fmt(row.report.min_se) << ',';
        if (row.scheme == "maxmin") csv << fmt(row.gamma_star);
        csv << ',';
        double maxp = 0.0;
        for (double p : row.cell_power) maxp = std::max(maxp, p);
        csv << fmt(maxp) << ',' << (row.power_pass ? "1" : "0") << ',';
      } else {
        csv << ",,,,,";
      }
      csv << (row.solver_ok ? "1" : "0") << ',' << csv_safe(row.note) << "\n";
    }
  }

  {
    nlohmann::json manifest;
    manifest["tool"] = "daamimo";
    manifest["version"] = "0.1.0";
    manifest["master_seed"] = spec.master_seed;
    const NetworkScenario& s = spec.base.scenario;
    manifest["scenario"] = {{"cells", s.L},
                            {"users_per_cell", s.K},
                            {"arrays_per_cell", s.N},
                            {"antennas_per_array", s.M},
                            {"pilot_length", s.tau_p},
                            {"coherence_interval", s.tau_c},
                            {"pilot_power", s.rho_tr},
                            {"noise_variance", s.sigma2},
                            {"cell_radius_m", s.cell_radius}};
    manifest["geometry"] = {{"array_ring_m", spec.base.geometry.array_ring_m},
                            {"user_ring_m", spec.base.geometry.user_ring_m}};
    manifest["one_ring"] = {{"angular_spread_rad", spec.base.one_ring.angular_spread_rad},
                            {"antenna_spacing_wavelengths", spec.base.one_ring.antenna_spacing_wavelengths},
                            {"pathloss_exponent", spec.base.one_ring.pathloss_exponent},
                            {"reference_gain_db", spec.base.one_ring.reference_gain_db}};
    manifest["schemes"] = nlohmann::json::array();
    if (spec.scheme_equal) manifest["schemes"].push_back("equal");
    if (spec.scheme_maxmin) manifest["schemes"].push_back("maxmin");
    manifest["monte_carlo"] = {{"draws", spec.mc_draws}};
    manifest["bisection"] = {{"epsilon", spec.bisection.epsilon},
                             {"max_iters", spec.bisection.max_iters},
                             {"tol_feas", spec.bisection.solver.tol_feas},
                             {"barrier_mu", spec.bisection.solver.barrier_mu},
                             {"polish", spec.bisection.polish}};
    manifest["sweep"] = nlohmann::json::array();
    for (std::size_t pi = 0; pi < spec.sweep.size(); ++pi) {
      nlohmann::json pt = {{"M", spec.sweep[pi].M}, {"N", spec.sweep[pi].N}};
      pt["mc_seed_equal"] = derive_seed(spec.master_seed, pi, 0);
      pt["mc_seed_maxmin"] = derive_seed(spec.master_seed, pi, 1);
      manifest["sweep"].push_back(pt);
    }
    manifest["csv_schema"] = results_csv_schema();
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw std::runtime_error("export_results: cannot write manifest.json");
    out << manifest.dump(2) << "\n";
  }

  for (const SweepRow& row : result.rows) {
    if (row.scheme != "maxmin" || row.trace.empty()) continue;
    std::ostringstream name;
    name << "bisection_M" << row.point.M << "_N" << row.point.N << ".csv";
    std::ofstream out(fs::path(dir) / name.str());
    if (!out) throw std::runtime_error("export_results: cannot write bisection trace");
    write_bisection_trace_csv(row.trace, out);
  }
}

}  // namespace daamimo
