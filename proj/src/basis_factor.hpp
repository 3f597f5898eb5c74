#pragma once

// Sparse LU of a simplex basis by Gaussian elimination with singleton
// detection and Markowitz pivoting. Simplex bases are mostly logical columns
// and short structural columns, so most pivots are singletons and fill-in
// stays small.

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace h2dispatch::detail {

class BasisFactor {
 public:
  using Column = std::vector<std::pair<int, double>>;  // (row, value)

  /// Factorizes the m x m matrix given by its columns. False if singular.
  bool factorize(int m, const std::vector<Column>& columns);

  /// Solves B x = b in place: b indexed by row on entry, x by column on exit.
  void solve(Eigen::VectorXd& v) const;
  /// Solves B^T y = d in place: d indexed by column on entry, y by row on exit.
  void solve_transposed(Eigen::VectorXd& v) const;

 private:
  struct Step {
    int row = 0;
    int col = 0;
    double pivot = 1.0;
    // Ranges into lower_ (row, multiplier) and upper_ (col, value, pivot excluded).
    int lower_begin = 0;
    int lower_end = 0;
    int upper_begin = 0;
    int upper_end = 0;
  };

  void eliminate(int r, int c);
  void deactivate_row(int r);

  int m_ = 0;
  std::vector<Step> steps_;
  std::vector<std::pair<int, double>> lower_;
  std::vector<std::pair<int, double>> upper_;
  mutable Eigen::VectorXd work_;

  // Active submatrix during factorization.
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<std::vector<int>> col_rows_;
  std::vector<char> row_done_;
  std::vector<char> col_done_;
  std::vector<int> scatter_;
  std::vector<int> col_singletons_;
  std::vector<int> row_singletons_;
};

}  // namespace h2dispatch::detail
