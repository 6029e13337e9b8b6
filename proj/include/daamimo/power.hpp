#ifndef DAAMIMO_POWER_HPP
#define DAAMIMO_POWER_HPP

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "daamimo/conic.hpp"
#include "daamimo/sinr.hpp"

namespace daamimo {

// Single scalar nu = sqrt(L / sum over (l,i,n) of tr(W Q W^H)) applied to
// every coefficient: the network-wide power sums to L, so the average cell
// power is 1. On asymmetric layouts individual cells can exceed 1; use
// verify_power_constraint to surface that.
PowerAllocation equal_power(const EstimationSet& est);

struct CellPowerReport {
  std::vector<double> cell_power;  // sum over (i,n) of nu^2 tr(W Q W^H)
  bool pass = false;               // all <= 1 + 1e-9
};
CellPowerReport verify_power_constraint(const PowerAllocation& alloc, const EstimationSet& est);

// The feasibility program deciding whether every user can reach SINR target
// gamma. Variables: all nu_{li}^n, then slacks rho_{jk}^{ln} for l != j which
// bound the coherent contamination nu_{lk}^n |xi_{jk}^{ln}| <= rho. Per user
// (j,k) one cone || [x_tilde, x_bar, sigma] || <= (1/sqrt(gamma)) sum_n nu
// chi, where x_tilde stacks sqrt(zeta) nu over (l,i,n) and x_bar holds, per
// interfering cell, the sum of that cell's N slacks; per cell one power cone;
// all variables nonnegative. With L = 1 there are no slacks and no x_bar
// block.
struct FeasibilityProblemSpec {
  int L = 0, K = 0, N = 0;
  double gamma = 0.0, sigma2 = 0.0;
  int num_nu = 0, num_rho = 0;
  SocProgram program;

  int nu_index(int l, int i, int n) const { return (l * K + i) * N + n; }
  int rho_index(int j, int k, int l, int n) const {
    const int pos = l < j ? l : l - 1;  // l != j
    return num_nu + (((j * K + k) * (L - 1) + pos) * N + n);
  }
  PowerAllocation extract(const std::vector<double>& point) const;
};

FeasibilityProblemSpec build_feasibility_problem(const SinrCoefficients& coeffs,
                                                 const EstimationSet& est, double gamma,
                                                 double sigma2);

// Interference-free Cauchy-Schwarz bound: no user can exceed
// max_{jk} (sum_n chi^2 / tr(W Q W^H)) / sigma2 under the per-cell unit power
// constraint, so it brackets the bisection from above.
double gamma_upper_bound(const SinrCoefficients& coeffs, const EstimationSet& est, double sigma2);

struct BisectionParams {
  // Mid solves near the optimum need every barrier round, so bisection
  // defaults to a deeper Newton budget than a bare feasibility call.
  BisectionParams() { solver.max_newton_iters = 2000; }

  double gamma_min = 0.0;
  double gamma_max = 0.0;  // <= 0 means use gamma_upper_bound
  double epsilon = 1e-3;   // bracket width at termination, linear SINR units
  int max_iters = 80;
  SolveOptions solver;
  // Re-solve at the final gamma with the slack minimized to optimality, which
  // equalizes the active users' constraint margins (and their SINRs on
  // symmetric layouts). Without it the returned witness is merely feasible.
  bool polish = true;
  int polish_max_newton_iters = 2000;
};

struct BisectionStep {
  int iter = 0;
  double lo = 0.0, hi = 0.0, mid = 0.0;
  bool feasible = false;
  int newton_iters = 0;
};

struct MaxminResult {
  PowerAllocation allocation;
  double gamma_star = 0.0;
  std::vector<BisectionStep> trace;
  bool polished = false;
  int total_newton_iters = 0;
};

// Thrown when the conic solver reports numerical failure mid-bisection; the
// bracket state identifies the offending subproblem.
struct MaxminError : std::runtime_error {
  MaxminError(const std::string& what, double lo_, double hi_, double mid_)
      : std::runtime_error(what), lo(lo_), hi(hi_), mid(mid_) {}
  double lo, hi, mid;
};

// Standard bisection on the SINR target: the bracket [lo, hi] keeps lo
// feasible (witness stored) and hi infeasible or the initial cap, and halves
// exactly each iteration until hi - lo < epsilon. The returned allocation is
// rescaled at the end so every cell power is <= 1 even after solver
// tolerances.
MaxminResult maxmin_power(const SinrCoefficients& coeffs, const EstimationSet& est, double sigma2,
                          const BisectionParams& params = {});

// CSV: iter,gamma_lo,gamma_hi,gamma_mid,verdict,newton_iters.
void write_bisection_trace_csv(const std::vector<BisectionStep>& trace, std::ostream& out);

}  // namespace daamimo

#endif
