#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "h2dispatch/errors.hpp"

namespace h2dispatch::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr int kMaxSingularRecoveries = 20;

enum class DualOutcome { kOptimal, kInfeasible, kLimit, kNeedsPrimal };

}  // namespace

BoundedSimplex::BoundedSimplex(const MilpInstance& inst, const LpOptions& options)
    : opt_(options), m_(inst.num_rows()), n_(inst.num_variables()) {
  a_ = inst.matrix();
  a_.makeCompressed();
  a_rows_ = a_;
  a_rows_.makeCompressed();
  b_.resize(m_);
  c_ = Eigen::VectorXd::Zero(n_ + m_);
  lo_.resize(n_ + m_);
  up_.resize(n_ + m_);
  for (int j = 0; j < n_; ++j) {
    const auto& v = inst.variable(j);
    c_(j) = -v.objective;
    lo_(j) = v.lower;
    up_(j) = v.upper;
  }
  for (int i = 0; i < m_; ++i) {
    const auto& r = inst.row(i);
    b_(i) = r.rhs;
    switch (r.sense) {
      case RowSense::kLe:
        lo_(n_ + i) = 0.0;
        up_(n_ + i) = kInf;
        break;
      case RowSense::kGe:
        lo_(n_ + i) = -kInf;
        up_(n_ + i) = 0.0;
        break;
      case RowSense::kEq:
        lo_(n_ + i) = 0.0;
        up_(n_ + i) = 0.0;
        break;
    }
  }
  x_ = Eigen::VectorXd::Zero(n_ + m_);
  d_ = Eigen::VectorXd::Zero(n_ + m_);
  reset_basis();
}

bool BoundedSimplex::is_boxed(int j) const {
  return std::isfinite(lo_(j)) && std::isfinite(up_(j));
}

double BoundedSimplex::nonbasic_value(int j) const {
  return state_[j] == VarState::kAtUpper ? up_(j) : lo_(j);
}

void BoundedSimplex::column(int j, Eigen::VectorXd& out) const {
  out.setZero(m_);
  if (j < n_) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) out(it.row()) = it.value();
  } else {
    out(j - n_) = 1.0;
  }
}

double BoundedSimplex::column_dot(int j, const Eigen::VectorXd& v) const {
  if (j >= n_) return v(j - n_);
  double s = 0.0;
  for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) s += it.value() * v(it.row());
  return s;
}

void BoundedSimplex::set_structural_bounds(const Eigen::VectorXd& lower,
                                           const Eigen::VectorXd& upper) {
  lo_.head(n_) = lower;
  up_.head(n_) = upper;
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kAtUpper && !std::isfinite(up_(j))) state_[j] = VarState::kAtLower;
    if (state_[j] == VarState::kAtLower && !std::isfinite(lo_(j)) && std::isfinite(up_(j))) {
      state_[j] = VarState::kAtUpper;
    }
    if (state_[j] != VarState::kBasic) x_(j) = nonbasic_value(j);
  }
}

void BoundedSimplex::reset_basis() {
  state_.assign(n_ + m_, VarState::kAtLower);
  head_.resize(m_);
  pos_of_.assign(n_ + m_, -1);
  for (int j = 0; j < n_; ++j) {
    const bool prefer_upper = c_(j) < 0.0 ? std::isfinite(up_(j)) : !std::isfinite(lo_(j));
    state_[j] = prefer_upper ? VarState::kAtUpper : VarState::kAtLower;
    x_(j) = nonbasic_value(j);
  }
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_of_[n_ + i] = i;
    state_[n_ + i] = VarState::kBasic;
  }
  factored_ = false;
}

void BoundedSimplex::set_basis(const std::vector<VarState>& status) {
  if (static_cast<int>(status.size()) != n_ + m_) {
    throw std::invalid_argument("set_basis: status vector has wrong size");
  }
  int basic = 0;
  for (auto s : status) basic += s == VarState::kBasic;
  if (basic != m_) throw std::invalid_argument("set_basis: basis must hold exactly one variable per row");
  state_ = status;
  pos_of_.assign(n_ + m_, -1);
  int k = 0;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::kBasic) {
      head_[k] = j;
      pos_of_[j] = k++;
    } else {
      if (state_[j] == VarState::kAtUpper && !std::isfinite(up_(j))) state_[j] = VarState::kAtLower;
      if (state_[j] == VarState::kAtLower && !std::isfinite(lo_(j)) && std::isfinite(up_(j))) {
        state_[j] = VarState::kAtUpper;
      }
      x_(j) = nonbasic_value(j);
    }
  }
  factored_ = false;
}

double BoundedSimplex::cost() const { return c_.head(n_).dot(x_.head(n_)); }

bool BoundedSimplex::refactor() {
  etas_.clear();
  if (m_ == 0) {
    factored_ = true;
    return true;
  }
  columns_.resize(m_);
  for (int k = 0; k < m_; ++k) {
    auto& col = columns_[k];
    col.clear();
    const int j = head_[k];
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) {
        col.emplace_back(static_cast<int>(it.row()), it.value());
      }
    } else {
      col.emplace_back(j - n_, 1.0);
    }
  }
  factored_ = factor_.factorize(m_, columns_);
  return factored_;
}

void BoundedSimplex::recover_singular() {
  if (++singular_recoveries_ > kMaxSingularRecoveries) {
    throw NumericError("simplex: basis repeatedly singular");
  }
  reset_basis();
  if (!refactor()) throw NumericError("simplex: logical basis failed to factor");
}

void BoundedSimplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  factor_.solve(v);
  for (const auto& e : etas_) {
    const double xr = v(e.pos) / e.pivot;
    v(e.pos) = xr;
    if (xr != 0.0) {
      for (const auto& [i, a] : e.entries) v(i) -= a * xr;
    }
  }
}

void BoundedSimplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v(it->pos);
    for (const auto& [i, a] : it->entries) s -= a * v(i);
    v(it->pos) = s / it->pivot;
  }
  factor_.solve_transposed(v);
}

void BoundedSimplex::pivot_row(const Eigen::VectorXd& rho, Eigen::VectorXd& alpha) {
  touched_.clear();
  auto touch = [&](int j) {
    if (!in_row_[j]) {
      in_row_[j] = 1;
      alpha(j) = 0.0;
      touched_.push_back(j);
    }
  };
  for (int i = 0; i < m_; ++i) {
    const double ri = rho(i);
    if (ri == 0.0) continue;
    if (state_[n_ + i] != VarState::kBasic) {
      touch(n_ + i);
      alpha(n_ + i) += ri;
    }
    for (RowMajorMatrix::InnerIterator it(a_rows_, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      if (state_[j] == VarState::kBasic) continue;
      touch(j);
      alpha(j) += ri * it.value();
    }
  }
}

void BoundedSimplex::clear_row(Eigen::VectorXd& alpha) {
  for (int j : touched_) {
    in_row_[j] = 0;
    alpha(j) = 0.0;
  }
  touched_.clear();
}

void BoundedSimplex::compute_primal() {
  Eigen::VectorXd rhs = b_;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::kBasic) continue;
    x_(j) = nonbasic_value(j);
    const double xj = x_(j);
    if (xj == 0.0) continue;
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) {
        rhs(it.row()) -= it.value() * xj;
      }
    } else {
      rhs(j - n_) -= xj;
    }
  }
  ftran(rhs);
  for (int k = 0; k < m_; ++k) x_(head_[k]) = rhs(k);
}

void BoundedSimplex::compute_duals(const Eigen::VectorXd& cost) {
  Eigen::VectorXd y(m_);
  for (int k = 0; k < m_; ++k) y(k) = cost(head_[k]);
  btran(y);
  for (int j = 0; j < n_ + m_; ++j) {
    d_(j) = state_[j] == VarState::kBasic ? 0.0 : cost(j) - column_dot(j, y);
  }
}

void BoundedSimplex::pivot(int pos, int entering, const Eigen::VectorXd& col,
                           VarState leaving_state) {
  const int leaving = head_[pos];
  Eta eta;
  eta.pos = pos;
  eta.pivot = col(pos);
  for (int i = 0; i < m_; ++i) {
    if (i != pos && col(i) != 0.0) eta.entries.emplace_back(i, col(i));
  }
  etas_.push_back(std::move(eta));

  head_[pos] = entering;
  pos_of_[entering] = pos;
  pos_of_[leaving] = -1;
  state_[entering] = VarState::kBasic;
  state_[leaving] = leaving_state;
  x_(leaving) = nonbasic_value(leaving);
  d_(entering) = 0.0;
}

bool BoundedSimplex::make_dual_feasible() {
  bool flipped = false;
  bool ok = true;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::kBasic || is_fixed(j)) continue;
    if (state_[j] == VarState::kAtLower && d_(j) < -opt_.dual_tol) {
      if (std::isfinite(up_(j))) {
        state_[j] = VarState::kAtUpper;
        flipped = true;
      } else {
        ok = false;
      }
    } else if (state_[j] == VarState::kAtUpper && d_(j) > opt_.dual_tol) {
      if (std::isfinite(lo_(j))) {
        state_[j] = VarState::kAtLower;
        flipped = true;
      } else {
        ok = false;
      }
    }
  }
  if (flipped) compute_primal();
  return ok;
}

bool BoundedSimplex::dual_feasible() const {
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::kBasic || is_fixed(j)) continue;
    if (state_[j] == VarState::kAtLower && d_(j) < -opt_.dual_tol) return false;
    if (state_[j] == VarState::kAtUpper && d_(j) > opt_.dual_tol) return false;
  }
  return true;
}

LpStatus BoundedSimplex::solve() {
  iteration_limit_ = iterations_ + (opt_.iteration_limit > 0
                                        ? opt_.iteration_limit
                                        : 200L * (m_ + n_) + 10000L);
  singular_recoveries_ = 0;
  if (m_ == 0) {
    for (int j = 0; j < n_; ++j) {
      if (lo_(j) > up_(j)) return LpStatus::kInfeasible;
      if (c_(j) < 0.0 && !std::isfinite(up_(j))) return LpStatus::kUnbounded;
      if (c_(j) > 0.0 && !std::isfinite(lo_(j))) return LpStatus::kUnbounded;
      x_(j) = c_(j) < 0.0 ? up_(j) : lo_(j);
    }
    return LpStatus::kOptimal;
  }
  if (!factored_ && !refactor()) recover_singular();
  compute_primal();
  compute_duals(c_);

  if (opt_.algorithm == LpAlgorithm::kDual && make_dual_feasible()) {
    const LpStatus st = dual_loop();
    if (st != LpStatus::kOptimal) return st;
    if (!refactor()) recover_singular();
    compute_primal();
    compute_duals(c_);
    bool primal_ok = true;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (x_(j) < lo_(j) - opt_.primal_tol || x_(j) > up_(j) + opt_.primal_tol) primal_ok = false;
    }
    if (primal_ok && dual_feasible()) return LpStatus::kOptimal;
  }
  return primal_loop();
}

LpStatus BoundedSimplex::dual_loop() {
  Eigen::VectorXd rho(m_);
  Eigen::VectorXd col(m_);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n_ + m_);
  touched_.clear();
  in_row_.assign(n_ + m_, 0);
  int degenerate_run = 0;
  bool retried = false;

  while (true) {
    if (!iteration_budget_left()) return LpStatus::kIterationLimit;
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!refactor()) recover_singular();
      compute_primal();
      compute_duals(c_);
      if (!make_dual_feasible()) return primal_loop();
    }

    const bool bland = degenerate_run >= opt_.bland_after;
    int r = -1;
    double worst = 0.0;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      const double infeas = std::max(lo_(j) - x_(j), x_(j) - up_(j));
      if (infeas <= opt_.primal_tol) continue;
      if (bland) {
        if (r < 0 || j < head_[r]) r = k;
      } else if (infeas > worst) {
        worst = infeas;
        r = k;
      }
    }
    if (r < 0) return LpStatus::kOptimal;

    const int p = head_[r];
    const bool to_lower = x_(p) < lo_(p);
    rho.setZero();
    rho(r) = 1.0;
    btran(rho);
    pivot_row(rho, alpha);

    auto eligible = [&](int j) {
      const double a = alpha(j);
      const bool at_lower = state_[j] == VarState::kAtLower;
      return to_lower ? ((at_lower && a < -kPivotTol) || (!at_lower && a > kPivotTol))
                      : ((at_lower && a > kPivotTol) || (!at_lower && a < -kPivotTol));
    };
    auto slack_of = [&](int j) {
      return state_[j] == VarState::kAtLower ? std::max(d_(j), 0.0) : std::max(-d_(j), 0.0);
    };

    // Harris two-pass ratio test over the pivot row.
    double theta_max = kInf;
    for (int j : touched_) {
      if (is_fixed(j) || !eligible(j)) continue;
      theta_max = std::min(theta_max, (slack_of(j) + opt_.dual_tol) / std::abs(alpha(j)));
    }
    if (!std::isfinite(theta_max)) {
      clear_row(alpha);
      if (!etas_.empty() && !retried) {
        retried = true;
        if (!refactor()) recover_singular();
        compute_primal();
        compute_duals(c_);
        if (!make_dual_feasible()) return primal_loop();
        continue;
      }
      return LpStatus::kInfeasible;
    }
    retried = false;

    int q = -1;
    double best_abs = 0.0;
    double best_ratio = kInf;
    for (int j : touched_) {
      if (is_fixed(j) || !eligible(j)) continue;
      const double ratio = slack_of(j) / std::abs(alpha(j));
      if (ratio > theta_max) continue;
      if (bland) {
        if (q < 0 || ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && j < q)) {
          q = j;
          best_ratio = ratio;
        }
      } else if (std::abs(alpha(j)) > best_abs) {
        best_abs = std::abs(alpha(j));
        q = j;
      }
    }

    column(q, col);
    ftran(col);
    if (std::abs(col(r)) < kPivotTol ||
        std::abs(col(r) - alpha(q)) > 1e-6 * std::max(1.0, std::abs(col(r)))) {
      // Row and column disagree: the eta file has drifted.
      clear_row(alpha);
      if (!refactor()) recover_singular();
      compute_primal();
      compute_duals(c_);
      if (!make_dual_feasible()) return primal_loop();
      continue;
    }

    const double theta_d = d_(q) / col(r);
    if (std::abs(theta_d) <= kDegenerateStep) {
      ++degenerate_run;
    } else {
      degenerate_run = 0;
    }
    for (int j : touched_) {
      if (j != q) d_(j) -= theta_d * alpha(j);
    }
    clear_row(alpha);
    d_(p) = -theta_d;

    const double bound = to_lower ? lo_(p) : up_(p);
    const double theta_p = (x_(p) - bound) / col(r);
    for (int k = 0; k < m_; ++k) x_(head_[k]) -= theta_p * col(k);
    x_(q) += theta_p;
    pivot(r, q, col, to_lower ? VarState::kAtLower : VarState::kAtUpper);
    ++iterations_;
  }
}

LpStatus BoundedSimplex::primal_loop() {
  Eigen::VectorXd col(m_);
  Eigen::VectorXd phase_cost(n_ + m_);
  int degenerate_run = 0;
  int final_checks = 0;

  if (!refactor()) recover_singular();
  compute_primal();

  while (true) {
    if (!iteration_budget_left()) return LpStatus::kIterationLimit;
    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      if (!refactor()) recover_singular();
      compute_primal();
    }

    bool phase_one = false;
    phase_cost.setZero();
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (x_(j) < lo_(j) - opt_.primal_tol) {
        phase_cost(j) = -1.0;
        phase_one = true;
      } else if (x_(j) > up_(j) + opt_.primal_tol) {
        phase_cost(j) = 1.0;
        phase_one = true;
      }
    }
    compute_duals(phase_one ? phase_cost : c_);

    const bool bland = degenerate_run >= opt_.bland_after;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::kBasic || is_fixed(j)) continue;
      double gain = 0.0;
      if (state_[j] == VarState::kAtLower && d_(j) < -opt_.dual_tol) gain = -d_(j);
      if (state_[j] == VarState::kAtUpper && d_(j) > opt_.dual_tol) gain = d_(j);
      if (gain <= 0.0) continue;
      if (bland) {
        q = j;
        break;
      }
      if (gain > best) {
        best = gain;
        q = j;
      }
    }

    if (q < 0) {
      if (phase_one) return LpStatus::kInfeasible;
      // Confirm optimality on a fresh factorization.
      if (etas_.empty() || final_checks >= 3) return LpStatus::kOptimal;
      ++final_checks;
      if (!refactor()) recover_singular();
      compute_primal();
      continue;
    }

    const double dir = state_[q] == VarState::kAtLower ? 1.0 : -1.0;
    column(q, col);
    ftran(col);

    // Pass 1: relaxed step limit.
    double theta_max = kInf;
    auto limit = [&](int k, bool relaxed, double& target) -> double {
      const double a = col(k);
      if (std::abs(a) <= kPivotTol) return kInf;
      const int j = head_[k];
      const double rate = -dir * a;
      const double xv = x_(j);
      const double tol = relaxed ? opt_.primal_tol : 0.0;
      if (phase_one && xv < lo_(j) - opt_.primal_tol) {
        if (rate <= 0.0) return kInf;
        target = lo_(j);
        return (lo_(j) - xv) / rate;
      }
      if (phase_one && xv > up_(j) + opt_.primal_tol) {
        if (rate >= 0.0) return kInf;
        target = up_(j);
        return (xv - up_(j)) / -rate;
      }
      if (rate < 0.0) {
        if (!std::isfinite(lo_(j))) return kInf;
        target = lo_(j);
        return std::max(0.0, xv - lo_(j) + tol) / -rate;
      }
      if (!std::isfinite(up_(j))) return kInf;
      target = up_(j);
      return std::max(0.0, up_(j) - xv + tol) / rate;
    };
    double dummy = 0.0;
    if (!bland) {
      for (int k = 0; k < m_; ++k) theta_max = std::min(theta_max, limit(k, true, dummy));
    }

    // Pass 2: largest pivot among rows within the relaxed limit.
    int r = -1;
    double r_target = 0.0;
    double r_ratio = kInf;
    double r_abs = 0.0;
    for (int k = 0; k < m_; ++k) {
      double target = 0.0;
      const double t = limit(k, false, target);
      if (!std::isfinite(t)) continue;
      if (bland) {
        if (t < r_ratio - 1e-12 || (t <= r_ratio + 1e-12 && r >= 0 && head_[k] < head_[r])) {
          r = k;
          r_ratio = t;
          r_target = target;
        }
      } else if (t <= theta_max && std::abs(col(k)) > r_abs) {
        r = k;
        r_abs = std::abs(col(k));
        r_ratio = t;
        r_target = target;
      }
    }

    const double flip = is_boxed(q) ? up_(q) - lo_(q) : kInf;
    if (r < 0 && !std::isfinite(flip)) {
      if (phase_one) {
        if (!refactor()) recover_singular();
        compute_primal();
        if (++final_checks > 3) throw NumericError("simplex: phase 1 direction without blocking row");
        continue;
      }
      return LpStatus::kUnbounded;
    }

    const double step = r < 0 ? flip : std::min(std::max(r_ratio, 0.0), flip);
    degenerate_run = step <= kDegenerateStep ? degenerate_run + 1 : 0;
    for (int k = 0; k < m_; ++k) x_(head_[k]) -= dir * step * col(k);
    if (r < 0 || flip <= step) {
      state_[q] = state_[q] == VarState::kAtLower ? VarState::kAtUpper : VarState::kAtLower;
      x_(q) = nonbasic_value(q);
    } else {
      x_(q) += dir * step;
      const VarState leaving = r_target == lo_(head_[r]) ? VarState::kAtLower : VarState::kAtUpper;
      pivot(r, q, col, leaving);
    }
    ++iterations_;
  }
}

}  // namespace h2dispatch::detail
