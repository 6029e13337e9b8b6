#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "daamimo/covariance.hpp"
#include "daamimo/estimation.hpp"
#include "daamimo/power.hpp"
#include "daamimo/scenario.hpp"
#include "daamimo/sinr.hpp"

using namespace daamimo;

namespace {

struct Setup {
  CovarianceSet cov;
  EstimationSet est;
  SinrCoefficients coeffs;
  double sigma2 = 1.0;
  int tau_c = 200;
};

Setup make_setup(int L, int K, int N, int M) {
  const GeometryParams geom;
  const OneRingParams ring;
  const NetworkScenario s = build_ring_network(geom, L, K, N, M);
  Setup out;
  out.cov = build_covariance_set_serial(s, ring);
  out.est = build_estimation_set_serial(out.cov, s.rho_tr);
  out.coeffs = compute_coefficients(out.cov, out.est);
  out.sigma2 = s.sigma2;
  out.tau_c = s.tau_c;
  return out;
}

// Strictly interior in every linear row: uniform positive nu well under the
// cell budgets, slacks clear of their nu |xi| bounds.
std::vector<double> strict_start(const FeasibilityProblemSpec& spec, const SinrCoefficients& coeffs,
                                 const EstimationSet& est) {
  double worst = 0.0;
  for (int l = 0; l < est.L(); ++l) {
    double cell = 0.0;
    for (int i = 0; i < est.K(); ++i)
      for (int n = 0; n < est.N(); ++n) cell += est.wqw_trace(l, n, i);
    worst = std::max(worst, cell);
  }
  const double s = std::sqrt(0.5 / worst);
  std::vector<double> v(static_cast<std::size_t>(spec.program.num_vars), 0.0);
  for (int idx = 0; idx < spec.num_nu; ++idx) v[static_cast<std::size_t>(idx)] = s;
  for (int j = 0; j < spec.L; ++j)
    for (int k = 0; k < spec.K; ++k)
      for (int l = 0; l < spec.L; ++l) {
        if (l == j) continue;
        for (int n = 0; n < spec.N; ++n)
          v[static_cast<std::size_t>(spec.rho_index(j, k, l, n))] =
              1.5 * s * std::abs(coeffs.xi(j, k, l, n)) + 0.01;
      }
  return v;
}

}  // namespace

TEST_CASE("equal power normalizes the network power sum") {
  const Setup su = make_setup(2, 2, 1, 4);
  const PowerAllocation alloc = equal_power(su.est);
  REQUIRE(alloc.nu_.size() == 4);
  for (double nu : alloc.nu_) CHECK(nu == alloc.nu_[0]);
  const CellPowerReport rep = verify_power_constraint(alloc, su.est);
  REQUIRE(rep.cell_power.size() == 2);
  CHECK(rep.cell_power[0] + rep.cell_power[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("equal power in a single cell uses the full budget") {
  const Setup su = make_setup(1, 2, 1, 4);
  const PowerAllocation alloc = equal_power(su.est);
  const CellPowerReport rep = verify_power_constraint(alloc, su.est);
  REQUIRE(rep.cell_power.size() == 1);
  CHECK(rep.cell_power[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.pass);
}

TEST_CASE("equal power surfaces per-cell overshoot on unbalanced traces") {
  // Hand-built traces 3 and 1: the network average is on budget but cell 0
  // individually is not, which verify_power_constraint must report.
  EstimationSet est(2, 1, 1, 1, 100.0);
  const CMatrix one = CMatrix::Identity(1, 1);
  est.set(est.index(0, 0, 0), one, one, one, 3.0);
  est.set(est.index(1, 0, 0), one, one, one, 1.0);
  const PowerAllocation alloc = equal_power(est);
  CHECK(alloc.nu(0, 0, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  const CellPowerReport rep = verify_power_constraint(alloc, est);
  CHECK(rep.cell_power[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(rep.cell_power[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(rep.pass);
  CHECK(rep.cell_power[0] + rep.cell_power[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("power verification accepts zero power and rejects shape mismatches") {
  const Setup su = make_setup(2, 1, 1, 4);
  const PowerAllocation zero(2, 1, 1, 0.0);
  const CellPowerReport rep = verify_power_constraint(zero, su.est);
  CHECK(rep.pass);
  for (double p : rep.cell_power) CHECK(p == 0.0);
  const PowerAllocation wrong(3, 1, 1, 0.0);
  CHECK_THROWS_AS(verify_power_constraint(wrong, su.est), std::invalid_argument);
}

TEST_CASE("feasibility program has the documented shape") {
  const Setup su = make_setup(2, 1, 1, 4);
  const double gamma = 0.5;
  const FeasibilityProblemSpec spec = build_feasibility_problem(su.coeffs, su.est, gamma, su.sigma2);
  CHECK(spec.num_nu == 2);
  CHECK(spec.num_rho == 2);
  CHECK(spec.program.num_vars == 4);
  // Two SINR cones, then two power cones.
  REQUIRE(spec.program.cones.size() == 4);
  // Rows: one slack link per (j,k,l!=j,n) plus one nonnegativity per variable.
  CHECK(spec.program.rows.size() == 2 + 4);
  const SocCone& sinr0 = spec.program.cones[0];
  // L*K*N interference rows, L-1 contamination rows, one noise row.
  REQUIRE(sinr0.rows.size() == 2 + 1 + 1);
  CHECK(sinr0.rows.back().empty());
  CHECK(sinr0.b.back() == doctest::Approx(std::sqrt(su.sigma2)).epsilon(1e-15));
  REQUIRE(sinr0.c.size() == 1);
  CHECK(sinr0.c[0].first == spec.nu_index(0, 0, 0));
  CHECK(sinr0.c[0].second ==
        doctest::Approx(su.coeffs.chi(0, 0, 0) / std::sqrt(gamma)).epsilon(1e-12));
  for (std::size_t c = 2; c < 4; ++c) {
    CHECK(spec.program.cones[c].d == 1.0);
    CHECK(spec.program.cones[c].c.empty());
  }
  CHECK_NOTHROW(spec.program.validate());

  const Setup one = make_setup(1, 2, 1, 4);
  const FeasibilityProblemSpec solo = build_feasibility_problem(one.coeffs, one.est, gamma, 1.0);
  CHECK(solo.num_rho == 0);
  CHECK(solo.program.num_vars == 2);
  CHECK(solo.program.cones.size() == 2 + 1);
  CHECK(solo.program.rows.size() == 2);
  // No contamination rows with a single cell: interference plus noise only.
  CHECK(solo.program.cones[0].rows.size() == 2 + 1);
}

TEST_CASE("witness extraction follows the variable layout") {
  const Setup su = make_setup(2, 2, 2, 3);
  const FeasibilityProblemSpec spec = build_feasibility_problem(su.coeffs, su.est, 0.3, su.sigma2);
  std::vector<double> point(static_cast<std::size_t>(spec.program.num_vars), 7.0);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int n = 0; n < 2; ++n)
        point[static_cast<std::size_t>(spec.nu_index(l, i, n))] = 100.0 * l + 10.0 * i + n;
  point[static_cast<std::size_t>(spec.nu_index(0, 0, 0))] = -0.25;  // clamped
  const PowerAllocation alloc = spec.extract(point);
  CHECK(alloc.nu(0, 0, 0) == 0.0);
  CHECK(alloc.nu(0, 0, 1) == 1.0);
  CHECK(alloc.nu(1, 0, 1) == 101.0);
  CHECK(alloc.nu(1, 1, 0) == 110.0);
  CHECK_THROWS_AS(spec.extract(std::vector<double>(1, 0.0)), std::invalid_argument);
}

TEST_CASE("invalid targets and brackets are rejected") {
  const Setup su = make_setup(1, 1, 1, 4);
  CHECK_THROWS_AS(build_feasibility_problem(su.coeffs, su.est, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_feasibility_problem(su.coeffs, su.est, 1.0, 0.0), std::invalid_argument);
  BisectionParams bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(maxmin_power(su.coeffs, su.est, su.sigma2, bad), std::invalid_argument);
  BisectionParams empty;
  empty.gamma_min = 1.0;
  empty.gamma_max = 0.5;
  CHECK_THROWS_AS(maxmin_power(su.coeffs, su.est, su.sigma2, empty), std::invalid_argument);
}

TEST_CASE("tiny targets are feasible, targets above the power-limited bound are not") {
  const Setup su = make_setup(2, 1, 1, 4);
  const double bound = gamma_upper_bound(su.coeffs, su.est, su.sigma2);
  CHECK(bound > 0.0);

  FeasibilityProblemSpec spec = build_feasibility_problem(su.coeffs, su.est, 1e-9, su.sigma2);
  SolveOptions opts;
  opts.initial_point = strict_start(spec, su.coeffs, su.est);
  CHECK(solve_feasibility(spec.program, opts).status == FeasibilityVerdict::Status::feasible);

  spec = build_feasibility_problem(su.coeffs, su.est, 2.0 * bound, su.sigma2);
  opts.initial_point = strict_start(spec, su.coeffs, su.est);
  opts.max_newton_iters = 2000;
  CHECK(solve_feasibility(spec.program, opts).status == FeasibilityVerdict::Status::infeasible);
}

TEST_CASE("single user max-min matches the closed form") {
  // One user takes the whole cell budget, so the optimum is
  // chi^2 / (zeta + sigma2 tr(W Q W^H)) exactly.
  const Setup su = make_setup(1, 1, 1, 8);
  const double chi = su.coeffs.chi(0, 0, 0);
  const double zeta = su.coeffs.zeta(0, 0, 0, 0, 0);
  const double trace = su.est.wqw_trace(0, 0, 0);
  const double expected = chi * chi / (zeta + trace * su.sigma2);
  CHECK(gamma_upper_bound(su.coeffs, su.est, su.sigma2) ==
        doctest::Approx(chi * chi / (trace * su.sigma2)).epsilon(1e-12));

  BisectionParams params;
  params.epsilon = 1e-6;
  const MaxminResult res = maxmin_power(su.coeffs, su.est, su.sigma2, params);
  CHECK(res.gamma_star == doctest::Approx(expected).epsilon(1e-5));
  // Feasibility is certified to 1e-7 on normalized constraints, which the
  // cone coefficient scales amplify to about 1.5e-6 of target overshoot here.
  CHECK(res.gamma_star <= expected * (1.0 + 1e-5));
  // The witness spends the full budget.
  const CellPowerReport rep = verify_power_constraint(res.allocation, su.est);
  CHECK(rep.pass);
  CHECK(rep.cell_power[0] == doctest::Approx(1.0).epsilon(1e-4));
  const SinrReport sinr = closed_form_sinr(su.coeffs, res.allocation, su.sigma2, su.tau_c);
  CHECK(sinr.gamma_at(0, 0) >= res.gamma_star * (1.0 - 1e-5));
}

TEST_CASE("bisection halves the bracket exactly and stops within the iteration bound") {
  const Setup su = make_setup(1, 2, 1, 4);
  BisectionParams params;
  params.epsilon = 1e-3;
  const MaxminResult res = maxmin_power(su.coeffs, su.est, su.sigma2, params);
  REQUIRE(!res.trace.empty());

  const double width0 = res.trace.front().hi - res.trace.front().lo;
  CHECK(res.trace.front().lo == 0.0);
  CHECK(res.trace.front().hi ==
        doctest::Approx(gamma_upper_bound(su.coeffs, su.est, su.sigma2)).epsilon(1e-15));
  double lo = res.trace.front().lo, hi = res.trace.front().hi;
  double worst_feasible = 0.0, best_infeasible = std::numeric_limits<double>::infinity();
  for (const BisectionStep& step : res.trace) {
    CHECK(step.lo == lo);
    CHECK(step.hi == hi);
    CHECK(step.mid == 0.5 * (lo + hi));  // bitwise: the bracket halves exactly
    if (step.feasible) {
      lo = step.mid;
      worst_feasible = std::max(worst_feasible, step.mid);
    } else {
      hi = step.mid;
      best_infeasible = std::min(best_infeasible, step.mid);
    }
  }
  CHECK(worst_feasible < best_infeasible);
  CHECK(hi - lo < params.epsilon);
  CHECK(res.gamma_star == lo);
  const int bound_iters = static_cast<int>(std::ceil(std::log2(width0 / params.epsilon))) + 1;
  CHECK(static_cast<int>(res.trace.size()) <= bound_iters);

  std::ostringstream csv;
  write_bisection_trace_csv(res.trace, csv);
  const std::string text = csv.str();
  CHECK(text.find("iter,gamma_lo,gamma_hi,gamma_mid,verdict,newton_iters") == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) ==
        res.trace.size() + 1);
  CHECK(text.find("feasible") != std::string::npos);
  CHECK(text.find("infeasible") != std::string::npos);
}

TEST_CASE("two-user max-min matches an exhaustive power sweep") {
  // With one cell the budget is tight at the optimum, so allocations reduce
  // to a power split f vs 1-f and a fine sweep is an independent oracle.
  const Setup su = make_setup(1, 2, 1, 4);
  const double t0 = su.est.wqw_trace(0, 0, 0);
  const double t1 = su.est.wqw_trace(0, 0, 1);
  double best = 0.0;
  PowerAllocation probe(1, 2, 1, 0.0);
  for (int i = 1; i < 10000; ++i) {
    const double f = 1e-4 * i;
    probe.nu(0, 0, 0) = std::sqrt(f / t0);
    probe.nu(0, 1, 0) = std::sqrt((1.0 - f) / t1);
    const SinrReport rep = closed_form_sinr(su.coeffs, probe, su.sigma2, su.tau_c);
    best = std::max(best, std::min(rep.gamma_at(0, 0), rep.gamma_at(0, 1)));
  }

  BisectionParams params;
  params.epsilon = 1e-5;
  const MaxminResult res = maxmin_power(su.coeffs, su.est, su.sigma2, params);
  CHECK(std::abs(res.gamma_star - best) <= 1e-4 * (1.0 + best));

  const SinrReport at_opt = closed_form_sinr(su.coeffs, res.allocation, su.sigma2, su.tau_c);
  const double g0 = at_opt.gamma_at(0, 0), g1 = at_opt.gamma_at(0, 1);
  CHECK(std::min(g0, g1) >= res.gamma_star * (1.0 - 1e-5));
  // The polish step equalizes the two binding users.
  CHECK(std::abs(g0 - g1) <= 5e-3 * res.gamma_star);
  CHECK(verify_power_constraint(res.allocation, su.est).pass);
  CHECK(res.polished);
}

TEST_CASE("a bracket above the achievable range yields the zero allocation") {
  const Setup su = make_setup(1, 1, 1, 4);
  const double bound = gamma_upper_bound(su.coeffs, su.est, su.sigma2);
  BisectionParams params;
  params.gamma_min = 2.0 * bound;
  params.gamma_max = 4.0 * bound;
  params.epsilon = 0.5 * bound;
  const MaxminResult res = maxmin_power(su.coeffs, su.est, su.sigma2, params);
  CHECK(res.gamma_star == params.gamma_min);
  CHECK(!res.polished);
  for (double nu : res.allocation.nu_) CHECK(nu == 0.0);
  for (const BisectionStep& step : res.trace) CHECK_FALSE(step.feasible);
}
