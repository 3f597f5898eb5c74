#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "h2dispatch/milp.hpp"
#include "simplex.hpp"

namespace h2dispatch {

int MilpInstance::add_variable(std::string name, VarKind kind, double lower, double upper,
                               double objective, VarKey key) {
  if (lower > upper) throw std::invalid_argument("variable " + name + ": lower bound above upper");
  if (std::isnan(lower) || std::isnan(upper) || !std::isfinite(objective)) {
    throw std::invalid_argument("variable " + name + ": non-finite data");
  }
  if (by_name_.count(name)) throw std::invalid_argument("duplicate variable name " + name);
  const int j = num_variables();
  if (!key.quantity.empty()) {
    if (!by_key_.emplace(key, j).second) throw std::invalid_argument("duplicate variable key " + name);
  }
  by_name_.emplace(name, j);
  variables_.push_back({std::move(name), kind, lower, upper, objective, std::move(key)});
  return j;
}

int MilpInstance::add_row(std::string name, const std::vector<Term>& terms, RowSense sense,
                          double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("row " + name + ": non-finite rhs");
  std::map<int, double> merged;
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw std::out_of_range("row " + name + ": unknown variable index");
    }
    if (!std::isfinite(t.coef)) throw std::invalid_argument("row " + name + ": non-finite coefficient");
    merged[t.var] += t.coef;
  }
  std::vector<Term> clean;
  clean.reserve(merged.size());
  for (const auto& [j, c] : merged) {
    if (c != 0.0) clean.push_back({j, c});
  }
  rows_.push_back({std::move(name), sense, rhs});
  row_terms_.push_back(std::move(clean));
  return num_rows() - 1;
}

int MilpInstance::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [](const Variable& v) { return v.kind == VarKind::kBinary; }));
}

Eigen::SparseMatrix<double> MilpInstance::matrix() const {
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < num_rows(); ++i) {
    for (const auto& t : row_terms_[i]) trips.emplace_back(i, t.var, t.coef);
  }
  Eigen::SparseMatrix<double> a(num_rows(), num_variables());
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

Eigen::VectorXd MilpInstance::objective() const {
  Eigen::VectorXd c(num_variables());
  for (int j = 0; j < num_variables(); ++j) c(j) = variables_[j].objective;
  return c;
}

std::optional<int> MilpInstance::find(const VarKey& key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MilpInstance::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int MilpInstance::at(const std::string& quantity, int hour, int segment) const {
  auto j = find(VarKey{quantity, hour, segment});
  if (!j) {
    throw std::out_of_range("no variable " + quantity + " at hour " + std::to_string(hour) +
                            (segment >= 0 ? " segment " + std::to_string(segment) : ""));
  }
  return *j;
}

double MilpInstance::objective_value(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (int j = 0; j < num_variables(); ++j) s += variables_[j].objective * x(j);
  return s;
}

double MilpInstance::row_activity(int i, const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (const auto& t : row_terms_[i]) s += t.coef * x(t.var);
  return s;
}

FeasibilityReport check_feasibility(const MilpInstance& inst, const Eigen::VectorXd& x,
                                    bool check_integrality) {
  if (x.size() != inst.num_variables()) throw std::invalid_argument("check_feasibility: size mismatch");
  FeasibilityReport rep;
  auto note = [&](double v, const std::string& who) {
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst = who;
    }
  };
  for (int j = 0; j < inst.num_variables(); ++j) {
    const auto& v = inst.variable(j);
    if (!std::isfinite(x(j))) {
      note(std::numeric_limits<double>::infinity(), v.name);
      continue;
    }
    note(v.lower - x(j), v.name);
    note(x(j) - v.upper, v.name);
    if (check_integrality && v.kind == VarKind::kBinary) note(std::abs(x(j) - std::round(x(j))), v.name);
  }
  for (int i = 0; i < inst.num_rows(); ++i) {
    const auto& r = inst.row(i);
    const double act = inst.row_activity(i, x);
    switch (r.sense) {
      case RowSense::kLe:
        note(act - r.rhs, r.name);
        break;
      case RowSense::kGe:
        note(r.rhs - act, r.name);
        break;
      case RowSense::kEq:
        note(std::abs(act - r.rhs), r.name);
        break;
    }
  }
  return rep;
}

LpResult solve_lp(const MilpInstance& inst, const LpOptions& options, const Eigen::VectorXd& lower,
                  const Eigen::VectorXd& upper) {
  detail::BoundedSimplex lp(inst, options);
  if (lower.size() > 0 || upper.size() > 0) {
    Eigen::VectorXd lo = lp.lower().head(inst.num_variables());
    Eigen::VectorXd up = lp.upper().head(inst.num_variables());
    if (lower.size() > 0) lo = lower;
    if (upper.size() > 0) up = upper;
    for (int j = 0; j < inst.num_variables(); ++j) {
      if (lo(j) > up(j)) return {LpStatus::kInfeasible, {}, 0.0, 0};
    }
    lp.set_structural_bounds(lo, up);
    lp.reset_basis();
  }
  LpResult res;
  res.status = lp.solve();
  res.iterations = lp.iterations();
  if (res.status == LpStatus::kOptimal) {
    res.x = lp.structural_values();
    res.objective = inst.objective_value(res.x);
  }
  return res;
}

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::kOptimal:
      return "optimal";
    case MilpStatus::kInfeasible:
      return "infeasible";
    case MilpStatus::kUnbounded:
      return "unbounded";
    case MilpStatus::kNodeLimit:
      return "node_limit";
  }
  return "unknown";
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

}  // namespace h2dispatch
