#include "daamimo/conic.hpp"
#include <cstdio>
#include <cstdlib>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace daamimo {

void SocProgram::validate() const {
  if (num_vars < 1) throw std::invalid_argument("SocProgram: num_vars must be >= 1");
  const auto check_entry = [&](int idx, double coeff, const char* where) {
    if (idx < 0 || idx >= num_vars)
      throw std::invalid_argument(std::string("SocProgram: variable index out of range in ") + where);
    if (!std::isfinite(coeff))
      throw std::invalid_argument(std::string("SocProgram: non-finite coefficient in ") + where);
  };
  for (const SocCone& cone : cones) {
    if (cone.rows.size() != cone.b.size())
      throw std::invalid_argument("SocProgram: cone row/offset count mismatch");
    for (const auto& row : cone.rows)
      for (const auto& [idx, coeff] : row) check_entry(idx, coeff, "cone row");
    for (double off : cone.b)
      if (!std::isfinite(off)) throw std::invalid_argument("SocProgram: non-finite cone offset");
    for (const auto& [idx, coeff] : cone.c) check_entry(idx, coeff, "cone rhs");
    if (!std::isfinite(cone.d)) throw std::invalid_argument("SocProgram: non-finite cone constant");
  }
  for (const LinearRow& row : rows) {
    for (const auto& [idx, coeff] : row.g) check_entry(idx, coeff, "linear row");
    if (!std::isfinite(row.h)) throw std::invalid_argument("SocProgram: non-finite linear constant");
  }
}

namespace {

double sparse_dot(const std::vector<std::pair<int, double>>& entries, const std::vector<double>& v) {
  double acc = 0.0;
  for (const auto& [idx, coeff] : entries) acc += coeff * v[idx];
  return acc;
}

// ||Av+b|| - (c.v + d) for cones, -(g.v + h) for rows; > 0 means violated.
double cone_violation(const SocCone& cone, const std::vector<double>& v) {
  double z2 = 0.0;
  for (std::size_t r = 0; r < cone.rows.size(); ++r) {
    const double zr = sparse_dot(cone.rows[r], v) + cone.b[r];
    z2 += zr * zr;
  }
  return std::sqrt(z2) - (sparse_dot(cone.c, v) + cone.d);
}

double row_violation(const LinearRow& row, const std::vector<double>& v) {
  return -(sparse_dot(row.g, v) + row.h);
}

SocProgram normalized_copy(const SocProgram& in) {
  SocProgram out = in;
  for (SocCone& cone : out.cones) {
    double scale = std::abs(cone.d);
    for (const auto& row : cone.rows)
      for (const auto& [idx, coeff] : row) scale = std::max(scale, std::abs(coeff));
    for (double off : cone.b) scale = std::max(scale, std::abs(off));
    for (const auto& [idx, coeff] : cone.c) scale = std::max(scale, std::abs(coeff));
    if (scale <= 0.0) continue;
    const double inv = 1.0 / scale;
    for (auto& row : cone.rows)
      for (auto& entry : row) entry.second *= inv;
    for (double& off : cone.b) off *= inv;
    for (auto& entry : cone.c) entry.second *= inv;
    cone.d *= inv;
  }
  for (LinearRow& row : out.rows) {
    double scale = std::abs(row.h);
    for (const auto& [idx, coeff] : row.g) scale = std::max(scale, std::abs(coeff));
    if (scale <= 0.0) continue;
    const double inv = 1.0 / scale;
    for (auto& entry : row.g) entry.second *= inv;
    row.h *= inv;
  }
  return out;
}

struct ConeState {
  Eigen::VectorXd z;
  double u = 0.0;    // c.v + d (+ s when slacked)
  double phi = 0.0;  // u^2 - ||z||^2
};

// Interior-point state for the phase-I problem: minimize t*s plus the log
// barrier of every constraint, with s relaxing exactly the slack-enabled
// cones. Variables are w = (v, s).
class PhaseOne {
 public:
  PhaseOne(const SocProgram& prog, const SolveOptions& opts)
      : P_(prog), opts_(opts), nv_(prog.num_vars), n_(prog.num_vars + 1) {
    m_barrier_ = 2.0 * static_cast<double>(P_.cones.size()) + static_cast<double>(P_.rows.size());
    dense_path_ = n_ <= 600 || P_.cones.empty();
  }

  FeasibilityVerdict run() {
    FeasibilityVerdict out;
    std::vector<double> v0(static_cast<std::size_t>(nv_), 0.0);
    if (!opts_.initial_point.empty()) {
      if (opts_.initial_point.size() != static_cast<std::size_t>(nv_))
        throw std::invalid_argument("solve_feasibility: initial point has wrong dimension");
      v0 = opts_.initial_point;
    }
    for (const LinearRow& row : P_.rows)
      if (row_violation(row, v0) >= 0.0)
        throw std::invalid_argument(
            "solve_feasibility: initial point must strictly satisfy every linear row");
    bool any_slack = false;
    double worst = 0.0;
    for (const SocCone& cone : P_.cones) {
      const double viol = cone_violation(cone, v0);
      if (cone.phase1_slack) {
        any_slack = true;
        worst = std::max(worst, viol);
      } else if (viol >= 0.0) {
        throw std::invalid_argument(
            "solve_feasibility: initial point must strictly satisfy every slack-disabled cone");
      }
    }
    if (!any_slack) {
      // Nothing for the slack to relax: the verdict is a direct evaluation.
      double viol = -std::numeric_limits<double>::infinity();
      for (const SocCone& cone : P_.cones) viol = std::max(viol, cone_violation(cone, v0));
      for (const LinearRow& row : P_.rows) viol = std::max(viol, row_violation(row, v0));
      out.status = viol <= opts_.tol_feas ? FeasibilityVerdict::Status::feasible
                                          : FeasibilityVerdict::Status::infeasible;
      out.s_star = viol;
      if (out.status == FeasibilityVerdict::Status::feasible)
        out.point.assign(v0.begin(), v0.end());
      return out;
    }

    w_ = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < nv_; ++i) w_(i) = v0[static_cast<std::size_t>(i)];
    w_(nv_) = worst + 1.0;
    if (!refresh_state()) throw std::logic_error("solve_feasibility: initial point not interior");

    const double tol = opts_.tol_feas;
    // Start t at the barrier pull on the slack coordinate, which makes s
    // already stationary at the initial point. Starting lower (say t = 1)
    // would first drag s up toward the analytic center, whose slack value is
    // huge when many cones carry slack, and then spend whole rounds pulling
    // it back down.
    double t = 1.0;
    for (std::size_t i = 0; i < P_.cones.size(); ++i)
      if (P_.cones[i].phase1_slack) t += 2.0 * cones_[i].u / cones_[i].phi;
    t = std::min(t, 1e6);
    out.newton_iters = 0;
    // Long-step safeguard. A big t multiplier occasionally lets the line
    // search trade tiny slack gains for pressing the iterate far into a cone
    // boundary, where the Hessian is too ill-conditioned for doubles and the
    // decrement stops falling. When a round stalls like that, roll back to
    // the last centered point and approach with a gentler multiplier instead
    // of grinding; the center itself stays reachable because its conditioning
    // is controlled by t.
    double mu = opts_.barrier_mu;
    Eigen::VectorXd w_center;
    double t_center = 0.0;
    const auto fail = [&](double tt) {
      out.status = FeasibilityVerdict::Status::numerical_failure;
      out.s_star = w_(nv_);
      out.achieved_gap = 2.0 * m_barrier_ / tt;
      return out;
    };
    while (true) {
      // Center at the current t. A stalled round shows up as the gradient
      // exploding well past the t scale (the iterate pressed deep into a cone
      // boundary, where doubles cannot produce usable directions) or as the
      // iteration count blowing far past what a healthy round ever needs.
      bool centered = false;
      bool stalled = false;
      int round_iters = 0;
      int grad_blowups = 0;
      double grad0 = 0.0;
      while (true) {
        if (opts_.early_exit && slacked_violation() <= 0.999 * tol) return finish_feasible(out, t);
        if (out.newton_iters >= opts_.max_newton_iters) return fail(t);
        Eigen::VectorXd grad, delta;
        if (!newton_direction(t, grad, delta)) {
          stalled = true;
          break;
        }
        const double lambda2 = std::max(0.0, -grad.dot(delta));
        if (getenv("DAAMIMO_IPM_TRACE"))
          fprintf(stderr, "iter=%d t=%g s=%g lambda2=%g |grad|=%g |delta|=%g viol=%g dir=%c\n",
                  out.newton_iters, t, w_(nv_), lambda2, grad.norm(), delta.norm(),
                  slacked_violation(), dir_kind_);
        if (lambda2 <= 0.0625) {
          centered = true;
          break;
        }
        // Healthy centering keeps the gradient at or below its round-start
        // scale (short excursions stay within a small factor). A sustained
        // fifty-fold blowup means the iterate was dragged deep into a cone
        // boundary and the round will grind, not converge.
        if (round_iters == 0) grad0 = grad.norm();
        if (grad.norm() > 50.0 * std::max(grad0, t)) {
          if (++grad_blowups >= 3) {
            stalled = true;
            break;
          }
        } else {
          grad_blowups = 0;
        }
        if (++round_iters > 120) {
          stalled = true;
          break;
        }
        ++out.newton_iters;
        if (!line_search(t, grad, delta)) {
          stalled = true;
          break;
        }
      }
      if (stalled || !centered) {
        if (w_center.size() == 0) return fail(t);
        mu = std::sqrt(mu);
        if (mu < 1.05) return fail(t);
        w_ = w_center;
        if (!refresh_state()) return fail(t);
        t = t_center * mu;
        continue;
      }
      w_center = w_;
      t_center = t;

      const double gap = 2.0 * m_barrier_ / t;
      if (opts_.early_exit && w_(nv_) - gap > tol) {
        out.status = FeasibilityVerdict::Status::infeasible;
        out.s_star = w_(nv_);
        out.achieved_gap = gap;
        out.max_violation = slacked_violation();
        return out;
      }
      if (m_barrier_ / t <= tol / 10.0) {
        if (slacked_violation() <= tol) return finish_feasible(out, t);
        out.status = FeasibilityVerdict::Status::infeasible;
        out.s_star = w_(nv_);
        out.achieved_gap = gap;
        out.max_violation = slacked_violation();
        return out;
      }
      t *= mu;
    }
  }

  const SocProgram* original = nullptr;  // for the final re-verification

 private:
  // Worst violation of the slack-free constraints at the current v. Rows and
  // slack-disabled cones are kept strictly feasible by the barrier, so only
  // slacked cones can be positive here.
  double slacked_violation() const {
    std::vector<double> v(w_.data(), w_.data() + nv_);
    double worst = -std::numeric_limits<double>::infinity();
    for (const SocCone& cone : P_.cones) worst = std::max(worst, cone_violation(cone, v));
    for (const LinearRow& row : P_.rows) worst = std::max(worst, row_violation(row, v));
    return worst;
  }

  FeasibilityVerdict finish_feasible(FeasibilityVerdict& out, double t) const {
    out.status = FeasibilityVerdict::Status::feasible;
    out.point.assign(w_.data(), w_.data() + nv_);
    out.s_star = w_(nv_);
    out.achieved_gap = 2.0 * m_barrier_ / t;
    out.max_violation = original ? max_constraint_violation(*original, out.point)
                                 : slacked_violation();
    return out;
  }

  // Fills cone/row states at w; false when w is outside the barrier domain.
  bool refresh_state() { return eval_state(w_, cones_, psi_, &phi_value_); }

  bool eval_state(const Eigen::VectorXd& w, std::vector<ConeState>& cones,
                  std::vector<double>& psi, double* barrier_value) const {
    cones.resize(P_.cones.size());
    psi.resize(P_.rows.size());
    double value = 0.0;
    for (std::size_t i = 0; i < P_.cones.size(); ++i) {
      const SocCone& cone = P_.cones[i];
      ConeState& st = cones[i];
      st.z.resize(static_cast<Eigen::Index>(cone.rows.size()));
      double z2 = 0.0;
      for (std::size_t r = 0; r < cone.rows.size(); ++r) {
        double zr = cone.b[r];
        for (const auto& [idx, coeff] : cone.rows[r]) zr += coeff * w(idx);
        st.z(static_cast<Eigen::Index>(r)) = zr;
        z2 += zr * zr;
      }
      double u = cone.d;
      for (const auto& [idx, coeff] : cone.c) u += coeff * w(idx);
      if (cone.phase1_slack) u += w(nv_);
      st.u = u;
      st.phi = u * u - z2;
      if (!(u > 0.0) || !(st.phi > 0.0)) return false;
      value -= std::log(st.phi);
    }
    for (std::size_t j = 0; j < P_.rows.size(); ++j) {
      double p = P_.rows[j].h;
      for (const auto& [idx, coeff] : P_.rows[j].g) p += coeff * w(idx);
      psi[j] = p;
      if (!(p > 0.0)) return false;
      value -= std::log(p);
    }
    if (barrier_value) *barrier_value = value;
    return true;
  }

  double objective(double t) const { return t * w_(nv_) + phi_value_; }

  Eigen::VectorXd gradient(double t) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
    g(nv_) = t;
    for (std::size_t i = 0; i < P_.cones.size(); ++i) {
      const SocCone& cone = P_.cones[i];
      const ConeState& st = cones_[i];
      const double a = 2.0 / st.phi;
      for (std::size_t r = 0; r < cone.rows.size(); ++r) {
        const double zr = st.z(static_cast<Eigen::Index>(r));
        for (const auto& [idx, coeff] : cone.rows[r]) g(idx) += a * coeff * zr;
      }
      const double bu = a * st.u;
      for (const auto& [idx, coeff] : cone.c) g(idx) -= bu * coeff;
      if (cone.phase1_slack) g(nv_) -= bu;
    }
    for (std::size_t j = 0; j < P_.rows.size(); ++j) {
      const double a = 1.0 / psi_[j];
      for (const auto& [idx, coeff] : P_.rows[j].g) g(idx) -= a * coeff;
    }
    return g;
  }

  // chat = (c; slack), m = A^T z - u * chat, both in (v, s) coordinates.
  void cone_vectors(std::size_t i, Eigen::VectorXd& chat, Eigen::VectorXd& mvec) const {
    const SocCone& cone = P_.cones[i];
    const ConeState& st = cones_[i];
    chat.setZero(n_);
    for (const auto& [idx, coeff] : cone.c) chat(idx) += coeff;
    if (cone.phase1_slack) chat(nv_) += 1.0;
    mvec.setZero(n_);
    for (std::size_t r = 0; r < cone.rows.size(); ++r) {
      const double zr = st.z(static_cast<Eigen::Index>(r));
      for (const auto& [idx, coeff] : cone.rows[r]) mvec(idx) += coeff * zr;
    }
    mvec -= st.u * chat;
  }

  Eigen::MatrixXd dense_hessian() const {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n_, n_);
    Eigen::VectorXd chat(n_), mvec(n_);
    for (std::size_t i = 0; i < P_.cones.size(); ++i) {
      const SocCone& cone = P_.cones[i];
      const ConeState& st = cones_[i];
      const double a = 2.0 / st.phi;
      for (const auto& row : cone.rows)
        for (const auto& [ia, ca] : row)
          for (const auto& [ib, cb] : row) H(ia, ib) += a * ca * cb;
      cone_vectors(i, chat, mvec);
      H.noalias() -= a * chat * chat.transpose();
      H.noalias() += (4.0 / (st.phi * st.phi)) * mvec * mvec.transpose();
    }
    for (std::size_t j = 0; j < P_.rows.size(); ++j) {
      const double a = 1.0 / (psi_[j] * psi_[j]);
      for (const auto& [ia, ca] : P_.rows[j].g)
        for (const auto& [ib, cb] : P_.rows[j].g) H(ia, ib) += a * ca * cb;
    }
    H.diagonal().array() += 1e-12;
    return H;
  }

  // Sparse positive definite base holding (2/phi)(A^T A + chat chat^T) plus
  // the row terms; the exact Hessian is recovered through a Woodbury update
  // with two dense columns per cone, +(4/phi^2) m m^T - (4/phi) chat chat^T.
  // Keeping the base SPD (rather than subtracting chat chat^T into it) is
  // what makes its factorization and the capacitance solve stable.
  bool sparse_newton(const Eigen::VectorXd& grad, Eigen::VectorXd& delta) {
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd chat(n_), mvec(n_);
    const std::size_t ncones = P_.cones.size();
    Eigen::MatrixXd U(n_, static_cast<Eigen::Index>(2 * ncones));
    Eigen::VectorXd wdiag(static_cast<Eigen::Index>(2 * ncones));
    std::vector<std::pair<int, double>> cvec;
    for (std::size_t i = 0; i < ncones; ++i) {
      const SocCone& cone = P_.cones[i];
      const ConeState& st = cones_[i];
      const double a = 2.0 / st.phi;
      for (const auto& row : cone.rows)
        for (const auto& [ia, ca] : row)
          for (const auto& [ib, cb] : row) trips.emplace_back(ia, ib, a * ca * cb);
      cvec.assign(cone.c.begin(), cone.c.end());
      if (cone.phase1_slack) cvec.emplace_back(nv_, 1.0);
      for (const auto& [ia, ca] : cvec)
        for (const auto& [ib, cb] : cvec) trips.emplace_back(ia, ib, a * ca * cb);
      cone_vectors(i, chat, mvec);
      U.col(static_cast<Eigen::Index>(2 * i)) = mvec;
      wdiag(static_cast<Eigen::Index>(2 * i)) = 4.0 / (st.phi * st.phi);
      U.col(static_cast<Eigen::Index>(2 * i + 1)) = chat;
      wdiag(static_cast<Eigen::Index>(2 * i + 1)) = -2.0 * a;
    }
    for (std::size_t j = 0; j < P_.rows.size(); ++j) {
      const double a = 1.0 / (psi_[j] * psi_[j]);
      for (const auto& [ia, ca] : P_.rows[j].g)
        for (const auto& [ib, cb] : P_.rows[j].g) trips.emplace_back(ia, ib, a * ca * cb);
    }
    for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, 1e-12);

    Eigen::SparseMatrix<double> B(n_, n_);
    B.setFromTriplets(trips.begin(), trips.end());
    if (!pattern_analyzed_) {
      ldlt_.analyzePattern(B);
      pattern_analyzed_ = true;
    }
    ldlt_.factorize(B);
    if (ldlt_.info() != Eigen::Success) return false;

    const auto apply_H = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return B * x + U * (wdiag.asDiagonal() * (U.transpose() * x));
    };
    // The Woodbury pieces depend on the factorization only, so they are
    // computed once and shared by every refinement pass.
    const Eigen::MatrixXd X = ldlt_.solve(U);
    Eigen::MatrixXd C = U.transpose() * X;
    C.diagonal() += wdiag.cwiseInverse();
    const Eigen::PartialPivLU<Eigen::MatrixXd> Clu(C);
    const auto woodbury = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
      const Eigen::VectorXd x0 = ldlt_.solve(rhs);
      return x0 - X * Clu.solve(U.transpose() * x0);
    };

    // Iterative refinement against the exact operator. Residual norms are
    // meaningless here (the Hessian mixes curvatures over many decades, so a
    // small residual can hide O(1) errors along flat directions); instead
    // iterate until the correction itself stops moving delta.
    const Eigen::VectorXd rhs = -grad;
    delta = woodbury(rhs);
    if (!delta.allFinite()) return false;
    for (int pass = 0; pass < 10; ++pass) {
      const Eigen::VectorXd resid = rhs - apply_H(delta);
      const Eigen::VectorXd corr = woodbury(resid);
      if (!corr.allFinite()) return false;
      delta += corr;
      if (corr.norm() <= 1e-9 * delta.norm()) return true;
    }
    return false;
  }

  bool newton_direction(double t, Eigen::VectorXd& grad, Eigen::VectorXd& delta) {
    grad = gradient(t);
    dir_kind_ = 's';
    if (!dense_path_ && sparse_newton(grad, delta)) return true;
    // Dense solve, also the fallback when Woodbury refinement stalls. Same
    // correction-based refinement as the sparse path.
    dir_kind_ = 'd';
    const Eigen::MatrixXd H = dense_hessian();
    const Eigen::VectorXd rhs = -grad;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() == Eigen::Success) {
      delta = ldlt.solve(rhs);
      if (delta.allFinite())
        for (int pass = 0; pass < 10; ++pass) {
          const Eigen::VectorXd corr = ldlt.solve(rhs - H * delta);
          if (!corr.allFinite()) break;
          delta += corr;
          if (corr.norm() <= 1e-9 * delta.norm()) return true;
        }
    }
    // Last resort: escalating regularization. The result bends toward plain
    // gradient descent, which is still a usable descent direction.
    dir_kind_ = 'r';
    Eigen::MatrixXd Hreg = H;
    for (double reg = 1e-10; reg <= 1e-2; reg *= 1e3) {
      Hreg.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> r(Hreg);
      if (r.info() == Eigen::Success) {
        delta = r.solve(rhs);
        if (delta.allFinite() && grad.dot(delta) < 0.0) return true;
      }
    }
    return false;
  }

  bool line_search(double t, const Eigen::VectorXd& grad, const Eigen::VectorXd& delta) {
    const double f0 = objective(t);
    const double slope = grad.dot(delta);
    std::vector<ConeState> trial_cones;
    std::vector<double> trial_psi;
    double trial_value = 0.0;
    for (double alpha = 1.0; alpha > 1e-18; alpha *= 0.5) {
      const Eigen::VectorXd w_try = w_ + alpha * delta;
      if (!eval_state(w_try, trial_cones, trial_psi, &trial_value)) continue;
      if (t * w_try(nv_) + trial_value <= f0 + 0.01 * alpha * slope) {
        w_ = w_try;
        cones_ = std::move(trial_cones);
        psi_ = std::move(trial_psi);
        phi_value_ = trial_value;
        return true;
      }
    }
    return false;
  }

  const SocProgram& P_;
  const SolveOptions& opts_;
  int nv_, n_;
  double m_barrier_ = 0.0;
  bool dense_path_ = false;
  bool pattern_analyzed_ = false;
  char dir_kind_ = 's';
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::VectorXd w_;
  std::vector<ConeState> cones_;
  std::vector<double> psi_;
  double phi_value_ = 0.0;
};

}  // namespace

double max_constraint_violation(const SocProgram& program, const std::vector<double>& point) {
  if (point.size() != static_cast<std::size_t>(program.num_vars))
    throw std::invalid_argument("max_constraint_violation: point has wrong dimension");
  double worst = -std::numeric_limits<double>::infinity();
  for (const SocCone& cone : program.cones) worst = std::max(worst, cone_violation(cone, point));
  for (const LinearRow& row : program.rows) worst = std::max(worst, row_violation(row, point));
  return worst;
}

FeasibilityVerdict solve_feasibility(const SocProgram& program, const SolveOptions& opts) {
  program.validate();
  if (!(opts.tol_feas > 0.0)) throw std::invalid_argument("solve_feasibility: tol_feas must be > 0");
  const SocProgram norm = normalized_copy(program);
  PhaseOne solver(norm, opts);
  solver.original = &program;
  return solver.run();
}

namespace {

void dump_linear_combo(std::ostream& out, const std::vector<std::pair<int, double>>& entries,
                       double constant) {
  bool first = true;
  for (const auto& [idx, coeff] : entries) {
    if (!first) out << " + ";
    out << coeff << "*v" << idx;
    first = false;
  }
  if (first || constant != 0.0) {
    if (!first) out << " + ";
    out << constant;
  }
}

}  // namespace

void dump_program(const SocProgram& program, std::ostream& out) {
  out << "soc_program vars=" << program.num_vars << " cones=" << program.cones.size()
      << " rows=" << program.rows.size() << "\n";
  for (std::size_t i = 0; i < program.cones.size(); ++i) {
    const SocCone& cone = program.cones[i];
    out << "cone " << i << (cone.phase1_slack ? "" : " noslack") << ": ||";
    for (std::size_t r = 0; r < cone.rows.size(); ++r) {
      if (r) out << " ; ";
      dump_linear_combo(out, cone.rows[r], cone.b[r]);
    }
    out << "|| <= ";
    dump_linear_combo(out, cone.c, cone.d);
    out << "\n";
  }
  for (std::size_t j = 0; j < program.rows.size(); ++j) {
    out << "row " << j << ": ";
    dump_linear_combo(out, program.rows[j].g, program.rows[j].h);
    out << " >= 0\n";
  }
}

}  // namespace daamimo
