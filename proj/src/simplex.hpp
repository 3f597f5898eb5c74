#pragma once

// Bounded-variable revised simplex in computational form
//
//   min c^T x   s.t.  [A | I] (x_s, x_l) = b,   lo <= x <= up
//
// Structural columns come from the MILP instance (objective negated), one
// logical per row carries the row sense in its bounds:
//   <= rhs : logical in [0, +inf)    >= rhs : (-inf, 0]    = rhs : [0, 0]
//
// The basis inverse is a sparse LU of the basis matrix followed by a product
// form eta file, refactored every `refactor_interval` updates.

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "basis_factor.hpp"
#include "h2dispatch/milp.hpp"

namespace h2dispatch::detail {

enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper };

class BoundedSimplex {
 public:
  BoundedSimplex(const MilpInstance& inst, const LpOptions& options);

  int rows() const { return m_; }
  int structurals() const { return n_; }

  /// Overrides structural bounds; nonbasic values follow their bound.
  void set_structural_bounds(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
  const Eigen::VectorXd& lower() const { return lo_; }
  const Eigen::VectorXd& upper() const { return up_; }

  /// All-logical basis with structurals at their cost-favourable bound.
  void reset_basis();
  /// Installs a status vector (size structurals + rows) from an earlier solve.
  void set_basis(const std::vector<VarState>& status);
  const std::vector<VarState>& basis() const { return state_; }

  LpStatus solve();

  Eigen::VectorXd structural_values() const { return x_.head(n_); }
  /// Value of the minimization objective c^T x.
  double cost() const;
  long iterations() const { return iterations_; }

 private:
  struct Eta {
    int pos = 0;
    double pivot = 1.0;
    std::vector<std::pair<int, double>> entries;
  };

  bool is_fixed(int j) const { return lo_(j) == up_(j); }
  bool is_boxed(int j) const;
  double nonbasic_value(int j) const;
  void column(int j, Eigen::VectorXd& out) const;
  double column_dot(int j, const Eigen::VectorXd& v) const;

  bool refactor();
  void recover_singular();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void compute_primal();
  void compute_duals(const Eigen::VectorXd& cost);
  /// Nonbasic entries of row rho^T [A | I] into alpha; indices listed in touched_.
  void pivot_row(const Eigen::VectorXd& rho, Eigen::VectorXd& alpha);
  void clear_row(Eigen::VectorXd& alpha);
  void pivot(int pos, int entering, const Eigen::VectorXd& col, VarState leaving_state);

  /// Flips boxed nonbasics with wrong-signed reduced cost. False if a
  /// non-boxed nonbasic stays dual infeasible.
  bool make_dual_feasible();
  bool dual_feasible() const;
  LpStatus dual_loop();
  LpStatus primal_loop();
  bool iteration_budget_left() const { return iterations_ < iteration_limit_; }

  LpOptions opt_;
  int m_ = 0;
  int n_ = 0;
  using RowMajorMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  Eigen::SparseMatrix<double> a_;
  RowMajorMatrix a_rows_;
  Eigen::VectorXd b_;
  Eigen::VectorXd c_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd up_;

  std::vector<VarState> state_;
  std::vector<int> head_;
  std::vector<int> pos_of_;
  Eigen::VectorXd x_;
  Eigen::VectorXd d_;

  BasisFactor factor_;
  std::vector<BasisFactor::Column> columns_;
  std::vector<Eta> etas_;
  std::vector<int> touched_;
  std::vector<char> in_row_;
  bool factored_ = false;
  int singular_recoveries_ = 0;

  long iterations_ = 0;
  long iteration_limit_ = 0;
};

}  // namespace h2dispatch::detail
