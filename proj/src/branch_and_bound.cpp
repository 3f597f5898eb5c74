#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <thread>

#include "h2dispatch/errors.hpp"
#include "h2dispatch/milp.hpp"
#include "simplex.hpp"

namespace h2dispatch {
namespace {

using detail::BoundedSimplex;
using detail::VarState;
using Basis = std::shared_ptr<const std::vector<VarState>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  long id = 0;
  long parent = -1;
  int depth = 0;
  double bound = kInf;
  std::vector<std::pair<int, std::int8_t>> fixings;
  Basis basis;
  // Branching that created this node, for pseudo-cost updates.
  int branched_var = -1;
  double branched_change = 0.0;
  double parent_objective = 0.0;
};

struct NodeOutcome {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  Basis basis;
  long iterations = 0;
};

class NodeSolver {
 public:
  NodeSolver(const MilpInstance& inst, const LpOptions& lp)
      : inst_(inst), lp_opts_(lp), simplex_(inst, lp) {
    root_lo_ = simplex_.lower().head(inst.num_variables());
    root_up_ = simplex_.upper().head(inst.num_variables());
  }

  NodeOutcome solve(const Node& node, bool continue_from_last) {
    Eigen::VectorXd lo = root_lo_;
    Eigen::VectorXd up = root_up_;
    for (const auto& [j, v] : node.fixings) lo(j) = up(j) = v;
    simplex_.set_structural_bounds(lo, up);
    if (!continue_from_last) {
      if (node.basis) {
        simplex_.set_basis(*node.basis);
      } else {
        simplex_.reset_basis();
      }
    }
    NodeOutcome out;
    const long before = simplex_.iterations();
    out.status = simplex_.solve();
    if (out.status == LpStatus::kIterationLimit) {
      // Retry once from the logical basis with the primal method.
      LpOptions retry = lp_opts_;
      retry.algorithm = LpAlgorithm::kPrimal;
      BoundedSimplex fresh(inst_, retry);
      fresh.set_structural_bounds(lo, up);
      fresh.reset_basis();
      out.status = fresh.solve();
      out.iterations += fresh.iterations();
      if (out.status == LpStatus::kIterationLimit) {
        throw NumericError("branch-and-bound: node LP hit the iteration limit twice");
      }
      if (out.status == LpStatus::kOptimal) {
        out.x = fresh.structural_values();
        out.objective = inst_.objective_value(out.x);
        out.basis = std::make_shared<const std::vector<VarState>>(fresh.basis());
      }
      simplex_.reset_basis();
      out.iterations += simplex_.iterations() - before;
      return out;
    }
    out.iterations = simplex_.iterations() - before;
    if (out.status == LpStatus::kOptimal) {
      out.x = simplex_.structural_values();
      out.objective = inst_.objective_value(out.x);
      out.basis = std::make_shared<const std::vector<VarState>>(simplex_.basis());
    }
    return out;
  }

 private:
  const MilpInstance& inst_;
  LpOptions lp_opts_;
  BoundedSimplex simplex_;
  Eigen::VectorXd root_lo_;
  Eigen::VectorXd root_up_;
};

class Search {
 public:
  Search(const MilpInstance& inst, const MilpOptions& opts) : inst_(inst), opts_(opts) {
    for (int j = 0; j < inst.num_variables(); ++j) {
      if (inst.variable(j).kind == VarKind::kBinary) binaries_.push_back(j);
    }
    down_history_.assign(inst.num_variables(), {0.0, 0});
    up_history_.assign(inst.num_variables(), {0.0, 0});
  }

  MilpSolution run() {
    const auto start = std::chrono::steady_clock::now();
    const int threads = std::max(1, opts_.threads);
    std::vector<std::unique_ptr<NodeSolver>> solvers;
    for (int k = 0; k < threads; ++k) solvers.push_back(std::make_unique<NodeSolver>(inst_, opts_.lp));

    MilpSolution sol;
    sol.gap_limit = opts_.gap;
    sol.integrality_tol = opts_.integrality_tol;
    sol.feasibility_tol = opts_.feasibility_tol;

    push(Node{next_id_++, -1, 0, kInf, {}, nullptr});
    long last_solved = -1;
    bool limited = false;

    while (!open_.empty() || plunge_) {
      if (sol.nodes >= opts_.node_limit) {
        limited = true;
        break;
      }
      if (opts_.time_limit_s > 0.0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
              opts_.time_limit_s) {
        limited = true;
        break;
      }

      std::vector<Node> batch;
      if (plunge_) {
        Node node = std::move(*plunge_);
        plunge_.reset();
        if (prunable(node.bound)) {
          pruned_bound_ = std::max(pruned_bound_, node.bound);
          continue;
        }
        batch.push_back(std::move(node));
      }
      if (batch.empty()) {
        while (!open_.empty() && static_cast<int>(batch.size()) < threads &&
               sol.nodes + static_cast<long>(batch.size()) < opts_.node_limit) {
          Node node = pop();
          if (prunable(node.bound)) {
            pruned_bound_ = std::max(pruned_bound_, node.bound);
            continue;
          }
          batch.push_back(std::move(node));
          if (!have_incumbent_) break;  // plunging stays sequential
        }
      }
      if (batch.empty()) continue;

      std::vector<NodeOutcome> results(batch.size());
      if (batch.size() == 1) {
        const bool follow = batch[0].parent >= 0 && batch[0].parent == last_solved;
        results[0] = solvers[0]->solve(batch[0], follow);
      } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(batch.size());
        for (std::size_t k = 0; k < batch.size(); ++k) {
          pool.emplace_back([&, k] {
            try {
              results[k] = solvers[k]->solve(batch[k], false);
            } catch (...) {
              errors[k] = std::current_exception();
            }
          });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      }
      last_solved = batch.size() == 1 ? batch[0].id : -1;

      for (std::size_t k = 0; k < batch.size(); ++k) {
        ++sol.nodes;
        sol.lp_iterations += results[k].iterations;
        if (results[k].status == LpStatus::kUnbounded) {
          if (batch[k].parent < 0) {
            sol.status = MilpStatus::kUnbounded;
            sol.wall_time_s = elapsed(start);
            return sol;
          }
          throw NumericError("branch-and-bound: unbounded node below a bounded root");
        }
        process(batch[k], results[k]);
        if (opts_.trace_bound) sol.bound_trace.push_back(global_bound());
      }
    }

    sol.wall_time_s = elapsed(start);
    sol.bound = global_bound();
    if (have_incumbent_) {
      sol.values = incumbent_;
      sol.objective = incumbent_obj_;
      sol.gap = std::abs(sol.bound - sol.objective) / std::max(1.0, std::abs(sol.objective));
      sol.status = limited ? MilpStatus::kNodeLimit : MilpStatus::kOptimal;
    } else {
      sol.status = limited ? MilpStatus::kNodeLimit : MilpStatus::kInfeasible;
      sol.gap = kInf;
    }
    return sol;
  }

 private:
  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  bool prunable(double bound) const {
    if (!have_incumbent_) return false;
    return bound <= incumbent_obj_ + opts_.gap * std::max(1.0, std::abs(incumbent_obj_));
  }

  double global_bound() const {
    double b = have_incumbent_ ? incumbent_obj_ : -kInf;
    b = std::max(b, pruned_bound_);
    for (const auto& n : open_) b = std::max(b, n.bound);
    if (plunge_) b = std::max(b, plunge_->bound);
    return b;
  }

  // Depth-first (newest node) until an incumbent exists, then best bound.
  bool before(const Node& a, const Node& b) const {
    if (!have_incumbent_) return a.id < b.id;
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }

  void push(Node node) {
    open_.push_back(std::move(node));
    std::push_heap(open_.begin(), open_.end(), [this](const Node& a, const Node& b) { return before(a, b); });
  }

  Node pop() {
    std::pop_heap(open_.begin(), open_.end(), [this](const Node& a, const Node& b) { return before(a, b); });
    Node n = std::move(open_.back());
    open_.pop_back();
    return n;
  }

  void reheap() {
    std::make_heap(open_.begin(), open_.end(), [this](const Node& a, const Node& b) { return before(a, b); });
  }

  void process(const Node& node, const NodeOutcome& res) {
    if (res.status != LpStatus::kOptimal) return;
    if (node.branched_var >= 0 && node.branched_change > 0.0) {
      const bool up = node.fixings.back().second == 1;
      auto& hist = up ? up_history_ : down_history_;
      auto& entry = hist[node.branched_var];
      entry.first += std::max(0.0, node.parent_objective - res.objective) / node.branched_change;
      entry.second += 1;
    }
    const double bound = std::min(res.objective, node.bound);
    if (prunable(bound)) {
      pruned_bound_ = std::max(pruned_bound_, bound);
      return;
    }

    const int branch_var = choose_branch(res.x);
    if (branch_var < 0) {
      try_incumbent(res.x);
      pruned_bound_ = std::max(pruned_bound_, bound);
      return;
    }

    const double v = res.x(branch_var);
    const std::int8_t first = v >= 0.5 ? 0 : 1;  // pushed first, explored second when plunging
    for (std::int8_t dir : {first, static_cast<std::int8_t>(1 - first)}) {
      Node child;
      child.id = next_id_++;
      child.parent = node.id;
      child.depth = node.depth + 1;
      child.bound = bound;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_var, dir);
      child.basis = res.basis;
      child.branched_var = branch_var;
      child.branched_change = dir == 1 ? std::ceil(v) - v : v - std::floor(v);
      child.parent_objective = res.objective;
      if (dir != first && opts_.threads <= 1) {
        plunge_ = std::move(child);
      } else {
        push(std::move(child));
      }
    }
  }

  // Pseudo-cost per unit change; the average over known variables when unseen.
  double pseudo_cost(const std::vector<std::pair<double, int>>& hist, int j) const {
    if (hist[j].second > 0) return hist[j].first / hist[j].second;
    double sum = 0.0;
    int n = 0;
    for (const auto& [total, count] : hist) {
      if (count > 0) {
        sum += total / count;
        ++n;
      }
    }
    return n > 0 ? sum / n : 1.0;
  }

  int choose_branch(const Eigen::VectorXd& x) const {
    int best = -1;
    double best_score = -1.0;
    for (int j : binaries_) {
      const double v = x(j);
      const double down = v - std::floor(v);
      const double up = std::ceil(v) - v;
      const double frac = std::min(down, up);
      if (frac <= opts_.integrality_tol) continue;
      double score = frac;
      if (opts_.branching == BranchingRule::kPseudoCost) {
        constexpr double kFloor = 1e-6;
        score = std::max(pseudo_cost(down_history_, j) * down, kFloor) *
                std::max(pseudo_cost(up_history_, j) * up, kFloor);
      }
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  void try_incumbent(const Eigen::VectorXd& x) {
    Eigen::VectorXd cand = x;
    for (int j : binaries_) cand(j) = std::round(cand(j));
    double obj = inst_.objective_value(cand);
    if (!check_feasibility(inst_, cand).feasible(opts_.feasibility_tol)) {
      Eigen::VectorXd lo(inst_.num_variables());
      Eigen::VectorXd up(inst_.num_variables());
      for (int j = 0; j < inst_.num_variables(); ++j) {
        lo(j) = inst_.variable(j).lower;
        up(j) = inst_.variable(j).upper;
      }
      for (int j : binaries_) lo(j) = up(j) = cand(j);
      LpResult fixed = solve_lp(inst_, opts_.lp, lo, up);
      if (fixed.status != LpStatus::kOptimal) return;
      cand = fixed.x;
      for (int j : binaries_) cand(j) = std::round(cand(j));
      if (!check_feasibility(inst_, cand).feasible(opts_.feasibility_tol)) return;
      obj = inst_.objective_value(cand);
    }
    if (!have_incumbent_ || obj > incumbent_obj_) {
      const bool first = !have_incumbent_;
      incumbent_ = cand;
      incumbent_obj_ = obj;
      have_incumbent_ = true;
      if (first) reheap();
    }
  }

  const MilpInstance& inst_;
  const MilpOptions& opts_;
  std::vector<int> binaries_;
  std::vector<std::pair<double, int>> down_history_;
  std::vector<std::pair<double, int>> up_history_;
  std::vector<Node> open_;
  // Preferred child of the last branching, processed next (single-threaded search).
  std::optional<Node> plunge_;
  long next_id_ = 0;
  bool have_incumbent_ = false;
  Eigen::VectorXd incumbent_;
  double incumbent_obj_ = -kInf;
  double pruned_bound_ = -kInf;
};

}  // namespace

MilpSolution solve_milp(const MilpInstance& inst, const MilpOptions& options) {
  if (!(options.gap >= 0.0)) throw std::invalid_argument("solve_milp: gap must be non-negative");
  if (options.node_limit <= 0) throw std::invalid_argument("solve_milp: node limit must be positive");
  for (int j = 0; j < inst.num_variables(); ++j) {
    const auto& v = inst.variable(j);
    if (v.kind == VarKind::kBinary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw std::invalid_argument("binary variable " + v.name + " has bounds outside [0, 1]");
    }
  }
  return Search(inst, options).run();
}

}  // namespace h2dispatch
