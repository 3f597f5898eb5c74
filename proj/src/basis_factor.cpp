#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace h2dispatch::detail {
namespace {

constexpr double kThreshold = 0.01;  // relative pivot threshold
constexpr double kTiny = 1e-11;      // absolute singularity cut-off
constexpr double kDrop = 1e-14;      // fill-in below this is dropped

double value_at(const std::vector<std::pair<int, double>>& row, int col) {
  for (const auto& [j, v] : row) {
    if (j == col) return v;
  }
  return 0.0;
}

void erase_index(std::vector<int>& list, int value) {
  auto it = std::find(list.begin(), list.end(), value);
  if (it != list.end()) {
    *it = list.back();
    list.pop_back();
  }
}

}  // namespace

void BasisFactor::deactivate_row(int r) {
  row_done_[r] = 1;
  for (const auto& [j, v] : rows_[r]) {
    if (col_done_[j]) continue;
    erase_index(col_rows_[j], r);
    if (col_rows_[j].size() == 1) col_singletons_.push_back(j);
  }
}

void BasisFactor::eliminate(int r, int c) {
  Step step;
  step.row = r;
  step.col = c;
  step.upper_begin = static_cast<int>(upper_.size());
  for (const auto& [j, v] : rows_[r]) {
    if (j == c) {
      step.pivot = v;
    } else {
      upper_.emplace_back(j, v);
    }
  }
  step.upper_end = static_cast<int>(upper_.size());
  step.lower_begin = static_cast<int>(lower_.size());
  col_done_[c] = 1;
  deactivate_row(r);

  for (int i : col_rows_[c]) {
    if (i == r || row_done_[i]) continue;
    auto& row = rows_[i];
    const double l = value_at(row, c) / step.pivot;
    // Remove column c from row i.
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k].first == c) {
        row[k] = row.back();
        row.pop_back();
        break;
      }
    }
    if (l == 0.0) continue;
    lower_.emplace_back(i, l);
    for (std::size_t k = 0; k < row.size(); ++k) scatter_[row[k].first] = static_cast<int>(k);
    for (int k = step.upper_begin; k < step.upper_end; ++k) {
      const auto [j, v] = upper_[k];
      if (col_done_[j]) continue;
      if (scatter_[j] >= 0) {
        row[scatter_[j]].second -= l * v;
      } else {
        const double fill = -l * v;
        if (std::abs(fill) <= kDrop) continue;
        scatter_[j] = static_cast<int>(row.size());
        row.emplace_back(j, fill);
        col_rows_[j].push_back(i);
      }
    }
    for (const auto& [j, v] : row) scatter_[j] = -1;
    if (row.size() == 1) row_singletons_.push_back(i);
  }
  col_rows_[c].clear();
  step.lower_end = static_cast<int>(lower_.size());
  steps_.push_back(step);
}

bool BasisFactor::factorize(int m, const std::vector<Column>& columns) {
  m_ = m;
  steps_.clear();
  steps_.reserve(m);
  lower_.clear();
  upper_.clear();
  // Inner vectors keep their capacity across refactorizations.
  rows_.resize(m);
  col_rows_.resize(m);
  for (auto& row : rows_) row.clear();
  for (auto& col : col_rows_) col.clear();
  row_done_.assign(m, 0);
  col_done_.assign(m, 0);
  scatter_.assign(m, -1);
  col_singletons_.clear();
  row_singletons_.clear();
  work_.resize(m);

  for (int c = 0; c < m; ++c) {
    for (const auto& [i, v] : columns[c]) {
      if (v == 0.0) continue;
      rows_[i].emplace_back(c, v);
      col_rows_[c].push_back(i);
    }
  }
  for (int c = 0; c < m; ++c) {
    if (col_rows_[c].size() == 1) col_singletons_.push_back(c);
  }
  for (int r = 0; r < m; ++r) {
    if (rows_[r].size() == 1) row_singletons_.push_back(r);
  }

  int done = 0;
  int scan_from = 0;
  while (done < m) {
    // Column singletons: no elimination below the pivot.
    if (!col_singletons_.empty()) {
      const int c = col_singletons_.back();
      col_singletons_.pop_back();
      if (col_done_[c] || col_rows_[c].size() != 1) continue;
      const int r = col_rows_[c][0];
      if (std::abs(value_at(rows_[r], c)) <= kTiny) return false;
      eliminate(r, c);
      ++done;
      continue;
    }
    // Row singletons: the pivot row carries nothing into other rows.
    if (!row_singletons_.empty()) {
      const int r = row_singletons_.back();
      row_singletons_.pop_back();
      if (row_done_[r]) continue;
      int c = -1;
      int live = 0;
      for (const auto& [j, v] : rows_[r]) {
        if (!col_done_[j]) {
          c = j;
          ++live;
        }
      }
      if (live != 1) continue;
      const double piv = std::abs(value_at(rows_[r], c));
      double col_max = 0.0;
      for (int i : col_rows_[c]) col_max = std::max(col_max, std::abs(value_at(rows_[i], c)));
      if (piv <= kTiny || piv < kThreshold * col_max) continue;
      eliminate(r, c);
      ++done;
      continue;
    }
    // General step: shortest active column, then the sparsest acceptable row.
    int best_c = -1;
    std::size_t best_count = std::numeric_limits<std::size_t>::max();
    for (int k = 0; k < m; ++k) {
      const int c = (scan_from + k) % m;
      if (col_done_[c]) continue;
      if (col_rows_[c].size() < best_count) {
        best_count = col_rows_[c].size();
        best_c = c;
        if (best_count <= 2) break;
      }
    }
    if (best_c < 0 || best_count == 0) return false;
    scan_from = best_c;
    double col_max = 0.0;
    for (int i : col_rows_[best_c]) col_max = std::max(col_max, std::abs(value_at(rows_[i], best_c)));
    if (col_max <= kTiny) return false;
    int best_r = -1;
    std::size_t best_len = std::numeric_limits<std::size_t>::max();
    double best_abs = 0.0;
    for (int i : col_rows_[best_c]) {
      const double a = std::abs(value_at(rows_[i], best_c));
      if (a < kThreshold * col_max) continue;
      if (rows_[i].size() < best_len || (rows_[i].size() == best_len && a > best_abs)) {
        best_len = rows_[i].size();
        best_abs = a;
        best_r = i;
      }
    }
    eliminate(best_r, best_c);
    ++done;
  }
  return true;
}

void BasisFactor::solve(Eigen::VectorXd& v) const {
  for (const auto& s : steps_) {
    const double t = v(s.row);
    if (t == 0.0) continue;
    for (int k = s.lower_begin; k < s.lower_end; ++k) v(lower_[k].first) -= lower_[k].second * t;
  }
  Eigen::VectorXd& x = work_;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    double acc = v(it->row);
    for (int k = it->upper_begin; k < it->upper_end; ++k) acc -= upper_[k].second * x(upper_[k].first);
    x(it->col) = acc / it->pivot;
  }
  v.swap(x);
}

void BasisFactor::solve_transposed(Eigen::VectorXd& v) const {
  Eigen::VectorXd& w = work_;
  for (const auto& s : steps_) {
    const double wr = v(s.col) / s.pivot;
    w(s.row) = wr;
    if (wr == 0.0) continue;
    for (int k = s.upper_begin; k < s.upper_end; ++k) v(upper_[k].first) -= upper_[k].second * wr;
  }
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    double acc = 0.0;
    for (int k = it->lower_begin; k < it->lower_end; ++k) acc += lower_[k].second * w(lower_[k].first);
    w(it->row) -= acc;
  }
  v.swap(w);
}

}  // namespace h2dispatch::detail
