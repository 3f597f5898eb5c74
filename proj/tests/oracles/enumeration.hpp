#pragma once

// Exhaustive MILP reference for the dispatch models: every combination of
// per-hour electrolyzer states (off, standby, on in segment s) is fixed in the
// instance and the remaining LP is solved with the dense tableau oracle.
//
// Start-up indicators stay relaxed in [0, 1]: with the status binaries fixed,
// their rows bound them below by 0 or 1 and the objective charges them, so the
// LP optimum sets them to that integral bound. `integral` records whether the
// best point is in fact integral.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "h2dispatch/milp.hpp"
#include "h2dispatch/models.hpp"
#include "oracles/tableau_lp.hpp"

namespace oracle {

struct EnumerationResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
  long lps = 0;
  bool integral = true;
};

/// State codes per hour: -2 off, -1 standby, s >= 0 on in segment s.
inline std::vector<int> hour_states(h2dispatch::ModelKind kind, int segments) {
  std::vector<int> out;
  if (kind != h2dispatch::ModelKind::kOnStandby) out.push_back(-2);
  if (kind != h2dispatch::ModelKind::kOnOff) out.push_back(-1);
  for (int s = 0; s < segments; ++s) out.push_back(s);
  return out;
}

inline EnumerationResult enumerate_dispatch(const h2dispatch::MilpInstance& inst,
                                            h2dispatch::ModelKind kind, int hours, int segments) {
  using h2dispatch::ModelKind;
  using h2dispatch::VarKey;
  const int n = inst.num_variables();
  std::vector<double> lo(n), up(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = inst.variable(j).lower;
    up[j] = inst.variable(j).upper;
  }
  auto idx = [&](const std::string& q, int t, int s = -1) -> std::optional<int> {
    return inst.find(VarKey{q, t, s});
  };
  const std::string on_name = kind == ModelKind::kOnOffStandby ? "zon"
                              : kind == ModelKind::kOnOff      ? "zoo"
                                                               : "zos";
  auto fix = [&](std::optional<int> j, double v) {
    if (j) lo[*j] = up[*j] = v;
  };

  const std::vector<int> states = hour_states(kind, segments);
  std::vector<int> pick(hours, 0);
  EnumerationResult best;
  while (true) {
    for (int t = 0; t < hours; ++t) {
      const int st = states[pick[t]];
      fix(idx(on_name, t), st >= 0 ? 1.0 : 0.0);
      fix(idx("zoff", t), st == -2 ? 1.0 : 0.0);
      fix(idx("zsb", t), st == -1 ? 1.0 : 0.0);
      for (int s = 0; s < segments; ++s) fix(idx("zh", t, s), st == s ? 1.0 : 0.0);
    }
    const TableauResult r = tableau_solve(inst, lo, up);
    ++best.lps;
    if (r.status == TableauResult::kOptimal && (!best.feasible || r.objective > best.objective)) {
      best.feasible = true;
      best.objective = r.objective;
      best.x = r.x;
    }
    int t = 0;
    while (t < hours && ++pick[t] == static_cast<int>(states.size())) pick[t++] = 0;
    if (t == hours) break;
  }
  if (best.feasible) {
    for (int j = 0; j < n; ++j) {
      if (inst.variable(j).kind == h2dispatch::VarKind::kBinary &&
          std::abs(best.x[j] - std::round(best.x[j])) > 1e-6) {
        best.integral = false;
      }
    }
  }
  return best;
}

}  // namespace oracle
