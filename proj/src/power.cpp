#include "daamimo/power.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace daamimo {

PowerAllocation equal_power(const EstimationSet& est) {
  double total = 0.0;
  for (int l = 0; l < est.L(); ++l)
    for (int i = 0; i < est.K(); ++i)
      for (int n = 0; n < est.N(); ++n) total += est.wqw_trace(l, n, i);
  if (!(total > 0.0)) throw std::invalid_argument("equal_power: estimate power traces sum to zero");
  return PowerAllocation(est.L(), est.K(), est.N(), std::sqrt(est.L() / total));
}

CellPowerReport verify_power_constraint(const PowerAllocation& alloc, const EstimationSet& est) {
  if (alloc.L != est.L() || alloc.K != est.K() || alloc.N != est.N())
    throw std::invalid_argument("verify_power_constraint: allocation does not match estimation set");
  CellPowerReport rep;
  rep.cell_power.assign(static_cast<std::size_t>(est.L()), 0.0);
  for (int l = 0; l < est.L(); ++l)
    for (int i = 0; i < est.K(); ++i)
      for (int n = 0; n < est.N(); ++n) {
        const double nu = alloc.nu(l, i, n);
        rep.cell_power[static_cast<std::size_t>(l)] += nu * nu * est.wqw_trace(l, n, i);
      }
  rep.pass = true;
  for (double p : rep.cell_power)
    if (p > 1.0 + 1e-9) rep.pass = false;
  return rep;
}

PowerAllocation FeasibilityProblemSpec::extract(const std::vector<double>& point) const {
  if (point.size() < static_cast<std::size_t>(num_nu))
    throw std::invalid_argument("FeasibilityProblemSpec: point too short");
  PowerAllocation alloc(L, K, N);
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < K; ++i)
      for (int n = 0; n < N; ++n)
        alloc.nu(l, i, n) = std::max(0.0, point[static_cast<std::size_t>(nu_index(l, i, n))]);
  return alloc;
}

FeasibilityProblemSpec build_feasibility_problem(const SinrCoefficients& coeffs,
                                                 const EstimationSet& est, double gamma,
                                                 double sigma2) {
  if (!(gamma > 0.0)) throw std::invalid_argument("build_feasibility_problem: gamma must be > 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("build_feasibility_problem: sigma2 must be > 0");
  if (coeffs.L != est.L() || coeffs.K != est.K() || coeffs.N != est.N())
    throw std::invalid_argument("build_feasibility_problem: coefficients do not match estimation set");

  FeasibilityProblemSpec spec;
  spec.L = coeffs.L;
  spec.K = coeffs.K;
  spec.N = coeffs.N;
  spec.gamma = gamma;
  spec.sigma2 = sigma2;
  const int L = spec.L, K = spec.K, N = spec.N;
  spec.num_nu = L * K * N;
  spec.num_rho = L * K * (L - 1) * N;
  spec.program.num_vars = spec.num_nu + spec.num_rho;

  const double inv_sqrt_gamma = 1.0 / std::sqrt(gamma);

  // Per-user SINR cone: || [x_tilde, x_bar, sigma] || <= (1/sqrt(gamma)) sum_n nu chi.
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k) {
      SocCone cone;
      for (int l = 0; l < L; ++l)
        for (int i = 0; i < K; ++i)
          for (int n = 0; n < N; ++n) {
            const double z = coeffs.zeta(j, k, l, i, n);
            cone.rows.push_back({{spec.nu_index(l, i, n), std::sqrt(std::max(0.0, z))}});
            cone.b.push_back(0.0);
          }
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;  // no contamination from the own cell
        std::vector<std::pair<int, double>> row;
        for (int n = 0; n < N; ++n) row.push_back({spec.rho_index(j, k, l, n), 1.0});
        cone.rows.push_back(std::move(row));
        cone.b.push_back(0.0);
      }
      cone.rows.push_back({});
      cone.b.push_back(std::sqrt(sigma2));
      for (int n = 0; n < N; ++n)
        cone.c.push_back({spec.nu_index(j, k, n), inv_sqrt_gamma * coeffs.chi(j, k, n)});
      cone.d = 0.0;
      spec.program.cones.push_back(std::move(cone));
    }

  // Per-cell power cone: || diag(sqrt(tr(W Q W^H))) nu_cell || <= 1.
  for (int l = 0; l < L; ++l) {
    SocCone cone;
    for (int i = 0; i < K; ++i)
      for (int n = 0; n < N; ++n) {
        cone.rows.push_back({{spec.nu_index(l, i, n), std::sqrt(est.wqw_trace(l, n, i))}});
        cone.b.push_back(0.0);
      }
    cone.d = 1.0;
    spec.program.cones.push_back(std::move(cone));
  }

  // Slack links rho >= nu |xi| (the absolute value keeps the bound valid for
  // either sign of xi; they coincide whenever xi >= 0) and nonnegativity.
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        for (int n = 0; n < N; ++n) {
          LinearRow link;
          link.g.push_back({spec.rho_index(j, k, l, n), 1.0});
          link.g.push_back({spec.nu_index(l, k, n), -std::abs(coeffs.xi(j, k, l, n))});
          spec.program.rows.push_back(std::move(link));
        }
      }
  for (int v = 0; v < spec.program.num_vars; ++v) spec.program.rows.push_back({{{v, 1.0}}, 0.0});

  return spec;
}

double gamma_upper_bound(const SinrCoefficients& coeffs, const EstimationSet& est, double sigma2) {
  double best = 0.0;
  for (int j = 0; j < coeffs.L; ++j)
    for (int k = 0; k < coeffs.K; ++k) {
      double acc = 0.0;
      for (int n = 0; n < coeffs.N; ++n) {
        const double tau = est.wqw_trace(j, n, k);
        if (!(tau > 0.0)) throw std::invalid_argument("gamma_upper_bound: zero power trace");
        const double chi = coeffs.chi(j, k, n);
        acc += chi * chi / tau;
      }
      best = std::max(best, acc / sigma2);
    }
  return best;
}

namespace {

// Strictly row-interior starting point near the given allocation: every
// variable positive, every slack strictly above nu |xi|, cell powers strictly
// under 1.
std::vector<double> interior_hint(const FeasibilityProblemSpec& spec, const SinrCoefficients& coeffs,
                                  const EstimationSet& est, const PowerAllocation& alloc) {
  const int L = spec.L, K = spec.K, N = spec.N;
  std::vector<double> v(static_cast<std::size_t>(spec.program.num_vars), 0.0);
  CellPowerReport powers = verify_power_constraint(alloc, est);
  double shrink = 0.999;
  for (double p : powers.cell_power)
    if (p > 0.0) shrink = std::min(shrink, 0.999 / std::sqrt(std::max(1.0, p)));
  double mean_nu = 0.0;
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < K; ++i)
      for (int n = 0; n < N; ++n) mean_nu += shrink * alloc.nu(l, i, n);
  mean_nu /= static_cast<double>(L) * K * N;
  // Linear rows must hold strictly at the start, and the barrier gradient
  // scales like one over the distance to each row, so every coordinate gets
  // a healthy margin rather than an epsilon one. The extra power this adds
  // is far below the 0.999 shrink headroom.
  const double nu_floor = 1e-6 + 1e-4 * mean_nu;
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < K; ++i)
      for (int n = 0; n < N; ++n)
        v[static_cast<std::size_t>(spec.nu_index(l, i, n))] =
            std::max(nu_floor, shrink * alloc.nu(l, i, n));
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l) {
        if (l == j) continue;
        for (int n = 0; n < N; ++n) {
          const double nu = v[static_cast<std::size_t>(spec.nu_index(l, k, n))];
          const double bound = nu * std::abs(coeffs.xi(j, k, l, n));
          v[static_cast<std::size_t>(spec.rho_index(j, k, l, n))] =
              1.5 * bound + 0.01 * (1.0 + bound);
        }
      }
  return v;
}

PowerAllocation uniform_start(const EstimationSet& est) {
  // Half the power budget of the tightest cell, spread uniformly.
  double worst = 0.0;
  for (int l = 0; l < est.L(); ++l) {
    double cell = 0.0;
    for (int i = 0; i < est.K(); ++i)
      for (int n = 0; n < est.N(); ++n) cell += est.wqw_trace(l, n, i);
    worst = std::max(worst, cell);
  }
  const double nu = worst > 0.0 ? std::sqrt(0.5 / worst) : 1e-6;
  return PowerAllocation(est.L(), est.K(), est.N(), nu);
}

}  // namespace

MaxminResult maxmin_power(const SinrCoefficients& coeffs, const EstimationSet& est, double sigma2,
                          const BisectionParams& params) {
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("maxmin_power: epsilon must be > 0");
  MaxminResult result;
  result.allocation = PowerAllocation(coeffs.L, coeffs.K, coeffs.N, 0.0);

  double lo = std::max(0.0, params.gamma_min);
  double hi = params.gamma_max > 0.0 ? params.gamma_max : gamma_upper_bound(coeffs, est, sigma2);
  if (!(hi > lo)) throw std::invalid_argument("maxmin_power: empty bracket");

  PowerAllocation witness;
  bool have_witness = false;
  PowerAllocation hint = uniform_start(est);

  for (int iter = 0; hi - lo >= params.epsilon && iter < params.max_iters; ++iter) {
    const double mid = 0.5 * (lo + hi);
    FeasibilityProblemSpec spec = build_feasibility_problem(coeffs, est, mid, sigma2);
    SolveOptions opts = params.solver;
    opts.initial_point = interior_hint(spec, coeffs, est, hint);
    const FeasibilityVerdict verdict = solve_feasibility(spec.program, opts);
    result.total_newton_iters += verdict.newton_iters;
    if (verdict.status == FeasibilityVerdict::Status::numerical_failure) {
      std::ostringstream msg;
      msg << "maxmin_power: conic solver failed at gamma=" << mid << " (bracket [" << lo << ", "
          << hi << "], gap " << verdict.achieved_gap << ")";
      throw MaxminError(msg.str(), lo, hi, mid);
    }
    const bool feasible = verdict.status == FeasibilityVerdict::Status::feasible;
    result.trace.push_back({iter, lo, hi, mid, feasible, verdict.newton_iters});
    if (feasible) {
      lo = mid;
      witness = spec.extract(verdict.point);
      have_witness = true;
      hint = witness;
    } else {
      hi = mid;
    }
  }
  result.gamma_star = lo;
  if (!have_witness) return result;  // target never reached above gamma_min; zero allocation

  if (params.polish && lo > 0.0) {
    // Minimize the slack at the final gamma with hard power and link
    // constraints: this maximizes the worst SINR-cone margin, equalizing the
    // active users instead of returning an arbitrary feasible point.
    FeasibilityProblemSpec spec = build_feasibility_problem(coeffs, est, lo, sigma2);
    for (std::size_t c = static_cast<std::size_t>(spec.L) * spec.K; c < spec.program.cones.size();
         ++c)
      spec.program.cones[c].phase1_slack = false;
    SolveOptions opts = params.solver;
    opts.early_exit = false;
    opts.max_newton_iters = params.polish_max_newton_iters;
    opts.initial_point = interior_hint(spec, coeffs, est, witness);
    const FeasibilityVerdict verdict = solve_feasibility(spec.program, opts);
    result.total_newton_iters += verdict.newton_iters;
    if (verdict.status == FeasibilityVerdict::Status::feasible) {
      witness = spec.extract(verdict.point);
      result.polished = true;
    }
  }

  // Solver tolerances allow per-cell power up to 1 + tol; rescale so the
  // constraint holds outright (the SINR shift is far below epsilon).
  CellPowerReport powers = verify_power_constraint(witness, est);
  double maxp = 0.0;
  for (double p : powers.cell_power) maxp = std::max(maxp, p);
  if (maxp > 1.0) {
    const double scale = std::sqrt(1.0 / maxp) * (1.0 - 1e-12);
    for (double& nu : witness.nu_) nu *= scale;
  }
  result.allocation = witness;
  return result;
}

void write_bisection_trace_csv(const std::vector<BisectionStep>& trace, std::ostream& out) {
  out << "iter,gamma_lo,gamma_hi,gamma_mid,verdict,newton_iters\n";
  std::ostringstream s;
  s.precision(17);
  for (const BisectionStep& step : trace) {
    s.str("");
    s << step.iter << ',' << step.lo << ',' << step.hi << ',' << step.mid << ','
      << (step.feasible ? "feasible" : "infeasible") << ',' << step.newton_iters;
    out << s.str() << '\n';
  }
}

}  // namespace daamimo
