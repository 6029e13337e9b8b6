#ifndef DAAMIMO_CONIC_HPP
#define DAAMIMO_CONIC_HPP

#include <iosfwd>
#include <utility>
#include <vector>

namespace daamimo {

// One second-order cone constraint ||A v + b|| <= c.v + d. Rows of A are
// sparse (variable index, coefficient) lists; an empty row list degenerates
// to 0 <= c.v + d.
struct SocCone {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> b;  // one offset per row
  std::vector<std::pair<int, double>> c;
  double d = 0.0;
  // Whether the phase-I slack relaxes this cone (||Av+b|| <= c.v + d + s).
  // Cones with slack disabled must hold strictly at the initial point.
  bool phase1_slack = true;
};

// g.v + h >= 0. Linear rows are never slacked; the initial point must satisfy
// them strictly.
struct LinearRow {
  std::vector<std::pair<int, double>> g;
  double h = 0.0;
};

struct SocProgram {
  int num_vars = 0;
  std::vector<SocCone> cones;
  std::vector<LinearRow> rows;

  // Throws std::invalid_argument on out-of-range indices, size mismatches,
  // or non-finite coefficients.
  void validate() const;
};

struct SolveOptions {
  // Feasibility tolerance on normalized constraints (each cone and row is
  // divided by its largest coefficient magnitude before solving).
  double tol_feas = 1e-7;
  int max_newton_iters = 200;
  // Stop as soon as the verdict is certain: feasible when the current point
  // already satisfies everything within tol_feas, infeasible when the
  // certified lower bound on the phase-I optimum exceeds tol_feas. Disable to
  // run the slack minimization to its optimality gap, which maximizes the
  // worst constraint margin (used to equalize the max-min solution).
  bool early_exit = true;
  double barrier_mu = 30.0;  // path-following multiplier
  // Optional starting point (size num_vars). Must satisfy all linear rows and
  // all slack-disabled cones strictly; slacked cones may be violated. Empty
  // means the origin.
  std::vector<double> initial_point;
};

struct FeasibilityVerdict {
  enum class Status { feasible, infeasible, numerical_failure };
  Status status = Status::numerical_failure;
  std::vector<double> point;   // populated when feasible
  double max_violation = 0.0;  // worst original-units constraint violation at
                               // the final point (negative = margin)
  double s_star = 0.0;         // phase-I slack at termination, normalized units
  double achieved_gap = 0.0;   // certified bound on s_star's suboptimality
  int newton_iters = 0;
};

// Phase-I interior-point feasibility: minimize the scalar slack s over the
// barrier of all constraints; feasible iff a point satisfying everything
// within tol_feas is found, infeasible iff the certified optimum of s exceeds
// tol_feas. Feasible witnesses are re-verified against the original
// (slack-free, unnormalized) constraints by direct evaluation.
FeasibilityVerdict solve_feasibility(const SocProgram& program, const SolveOptions& opts = {});

// Largest violation over all constraints at the point (negative = margin).
double max_constraint_violation(const SocProgram& program, const std::vector<double>& point);

// One constraint per line, human-readable, for debugging and cross-checks.
void dump_program(const SocProgram& program, std::ostream& out);

}  // namespace daamimo

#endif
