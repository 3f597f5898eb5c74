#pragma once

// Generic sparse MILP (maximization) and its solver: a bounded-variable
// revised simplex for relaxations and best-first branch-and-bound on binaries.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace h2dispatch {

enum class VarKind : std::uint8_t { kContinuous, kBinary };
enum class RowSense : std::uint8_t { kLe, kEq, kGe };

/// Structured tag of a model variable: quantity name, hour, segment (-1 if none).
struct VarKey {
  std::string quantity;
  int hour = -1;
  int segment = -1;
  auto operator<=>(const VarKey&) const = default;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;
  double objective = 0.0;
  VarKey key;
};

struct Row {
  std::string name;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
};

struct Term {
  int var;
  double coef;
};

/// Maximize c^T x subject to sparse rows and finite variable bounds.
class MilpInstance {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper, double objective,
                   VarKey key = {});
  /// Duplicate variables in `terms` are summed; zero coefficients are dropped.
  int add_row(std::string name, const std::vector<Term>& terms, RowSense sense, double rhs);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;
  int num_continuous() const { return num_variables() - num_binaries(); }

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int j) const { return variables_[j]; }
  Variable& variable(int j) { return variables_[j]; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(int i) const { return rows_[i]; }
  const std::vector<std::vector<Term>>& row_terms() const { return row_terms_; }

  /// Column-major constraint matrix (rows x variables).
  Eigen::SparseMatrix<double> matrix() const;
  Eigen::VectorXd objective() const;

  std::optional<int> find(const VarKey& key) const;
  std::optional<int> find(const std::string& name) const;
  /// Like find() but throws std::out_of_range.
  int at(const std::string& quantity, int hour, int segment = -1) const;

  double objective_value(const Eigen::VectorXd& x) const;
  double row_activity(int i, const Eigen::VectorXd& x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Row> rows_;
  std::vector<std::vector<Term>> row_terms_;
  std::map<VarKey, int> by_key_;
  std::map<std::string, int> by_name_;
};

/// Largest violation of rows, bounds and integrality at x.
struct FeasibilityReport {
  double max_violation = 0.0;
  std::string worst;  // row or variable name, empty if feasible
  bool feasible(double tol) const { return max_violation <= tol; }
};

FeasibilityReport check_feasibility(const MilpInstance& inst, const Eigen::VectorXd& x,
                                    bool check_integrality = true);

// ---------------------------------------------------------------------------
// LP relaxation

enum class LpStatus : std::uint8_t { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
enum class LpAlgorithm : std::uint8_t { kDual, kPrimal };

struct LpOptions {
  LpAlgorithm algorithm = LpAlgorithm::kDual;
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  int refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after = 50;
  long iteration_limit = 0;  // 0: automatic
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;  // maximization sense
  long iterations = 0;
};

/// Solves the continuous relaxation (binaries in [lower, upper]). Bounds may be
/// overridden per variable through `lower`/`upper` when non-empty.
LpResult solve_lp(const MilpInstance& inst, const LpOptions& options = {},
                  const Eigen::VectorXd& lower = {}, const Eigen::VectorXd& upper = {});

// ---------------------------------------------------------------------------
// Branch-and-bound

enum class MilpStatus : std::uint8_t { kOptimal, kInfeasible, kUnbounded, kNodeLimit };

/// Most-fractional picks the binary closest to 0.5. Pseudo-cost scores
/// candidates by the objective degradation per unit change seen in earlier
/// branchings (product rule), falling back to most-fractional without history.
enum class BranchingRule : std::uint8_t { kMostFractional, kPseudoCost };

const char* to_string(MilpStatus status);
const char* to_string(LpStatus status);

struct MilpOptions {
  double gap = 1e-4;  // relative optimality gap
  long node_limit = 1000000;
  double time_limit_s = 0.0;  // 0: none
  int threads = 1;            // 1: deterministic single-threaded search
  BranchingRule branching = BranchingRule::kPseudoCost;
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-6;
  LpOptions lp;
  /// Record the global bound after every processed node.
  bool trace_bound = false;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::kInfeasible;
  Eigen::VectorXd values;  // empty when no incumbent exists
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;  // |bound - objective| / max(1, |objective|)
  long nodes = 0;
  long lp_iterations = 0;
  double wall_time_s = 0.0;
  double gap_limit = 0.0;
  double integrality_tol = 0.0;
  double feasibility_tol = 0.0;
  std::vector<double> bound_trace;

  bool has_incumbent() const { return values.size() > 0; }
};

MilpSolution solve_milp(const MilpInstance& inst, const MilpOptions& options = {});

// ---------------------------------------------------------------------------
// LP-format interchange

/// CPLEX LP text with 12 significant digits per coefficient.
void write_lp(std::ostream& out, const MilpInstance& inst, const std::string& problem_name = "");

/// Parses "name = value" (or "name value") lines; '#' starts a comment.
/// Unknown names throw ParseError; missing variables default to 0.
Eigen::VectorXd read_solution(std::istream& in, const MilpInstance& inst,
                              const std::string& source = "solution");

/// Wraps an externally produced point as a MilpSolution after a feasibility check.
MilpSolution verify_external_solution(const MilpInstance& inst, const Eigen::VectorXd& x,
                                      double tol = 1e-6);

}  // namespace h2dispatch
