// Acceptance checks: one PASS/FAIL line per criterion at pinned tolerances.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "h2dispatch/bounds.hpp"
#include "h2dispatch/expost.hpp"
#include "h2dispatch/models.hpp"
#include "h2dispatch/physics.hpp"
#include "h2dispatch/scenario.hpp"
#include "h2dispatch/segmentation.hpp"
#include "h2dispatch/study.hpp"
#include "oracles/enumeration.hpp"
#include "oracles/random_scenario.hpp"

using namespace h2dispatch;

namespace {

constexpr double kGap = 1e-4;
constexpr double kBreakpointTolMw = 1e-6;
constexpr double kSurplusTolKg = 1e-6;
constexpr double kStorageTolKg = 1e-6;
constexpr double kInversionTol = 1e-8;
constexpr double kGuardBandEur = 1.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::vector<double> final_storage_levels;

RunResult solve(ModelKind model, int segments, const PlantScenario& scn) {
  RunSpec spec;
  spec.model = model;
  spec.segments = segments;
  spec.horizon_hours = scn.hours();
  spec.gap = kGap;
  spec.deterministic = true;
  RunResult run = run_single(spec, scn);
  if (run.has_schedule && scn.hydrogen_price_eur_kg > 0.0) {
    final_storage_levels.push_back(run.schedule.hours.back().storage_kg);
  }
  return run;
}

PlantScenario unconstrained(const Eigen::VectorXd& prices) {
  PlantScenario scn = reference_plant();
  scn.daily_demand_kg = 0.0;
  set_series(scn, {}, prices, Eigen::VectorXd::Ones(prices.size()));
  return scn;
}

Outcome oracle_equivalence() {
  Outcome out;
  int count = 0, feasible = 0;
  double worst = 0.0;
  const ModelKind kinds[] = {ModelKind::kOnOffStandby, ModelKind::kOnOff, ModelKind::kOnStandby};
  for (int k = 0; k < 60; ++k) {
    const ModelKind kind = kinds[k % 3];
    const int segments = 1 + (k / 3) % 2;
    oracle::RandomScenarioOptions opt;
    opt.hours = 3 + (k / 6) % 4;
    opt.spike_probability = 0.15;
    PlantScenario scn = oracle::random_scenario(1000 + k, opt);
    scn.startup_cost_eur = 150.0 * (k % 5);
    const SegmentSet seg = make_segments(scn.physics, scn.minimum_load_mw, segments);
    const MilpInstance inst = build_model(kind, scn, seg);
    MilpOptions mo;
    mo.gap = kGap;
    const MilpSolution bb = solve_milp(inst, mo);
    const oracle::EnumerationResult en = oracle::enumerate_dispatch(inst, kind, opt.hours, segments);
    ++count;
    const bool bb_feasible = bb.has_incumbent();
    if (bb_feasible != en.feasible) {
      out.pass = false;
      out.detail += " seed " + std::to_string(1000 + k) + " feasibility mismatch;";
      continue;
    }
    if (!en.feasible) continue;
    ++feasible;
    if (!en.integral) {
      out.pass = false;
      out.detail += " seed " + std::to_string(1000 + k) + " enumeration optimum not integral;";
    }
    const double diff = std::abs(bb.objective - en.objective) / std::max(1.0, std::abs(en.objective));
    worst = std::max(worst, diff);
    if (diff > kGap) {
      out.pass = false;
      out.detail += " seed " + std::to_string(1000 + k) + " rel diff " + std::to_string(diff) + ";";
    }
  }
  std::ostringstream s;
  s << count << " instances (" << feasible << " feasible), worst relative difference " << worst;
  out.detail = s.str() + out.detail;
  return out;
}

Outcome variable_counts() {
  Outcome out;
  int checked = 0;
  for (int hours : {1, 7, 24, 48}) {
    PlantScenario scn = oracle::random_scenario(7, {.hours = hours});
    for (int s : kSupportedSegmentCounts) {
      const SegmentSet seg = make_segments(scn.physics, scn.minimum_load_mw, s);
      const MilpInstance oos = build_oos(scn, seg);
      const MilpInstance oo = build_oo(scn, seg);
      const MilpInstance os = build_os(scn, seg);
      const bool ok = oos.num_binaries() == hours * (4 + s) && oo.num_binaries() == hours * (2 + s) &&
                      os.num_binaries() == hours * (1 + s) && oos.num_continuous() == hours * (9 + s);
      if (!ok) {
        out.pass = false;
        out.detail += " mismatch at T=" + std::to_string(hours) + " S=" + std::to_string(s) + ";";
      }
      ++checked;
    }
  }
  out.detail = std::to_string(checked) + " (T, S) pairs x 3 models" + out.detail;
  return out;
}

Outcome model_nesting() {
  Outcome out;
  int infeasible = 0;
  for (int k = 0; k < 20; ++k) {
    const PlantScenario scn = oracle::random_scenario(2000 + k, {.hours = 48});
    const RunResult oos = solve(ModelKind::kOnOffStandby, 12, scn);
    const RunResult oo = solve(ModelKind::kOnOff, 12, scn);
    const RunResult os = solve(ModelKind::kOnStandby, 12, scn);
    if (!oos.has_schedule) {
      ++infeasible;
      out.pass = false;
      out.detail += " seed " + std::to_string(2000 + k) + " OOS has no schedule;";
      continue;
    }
    const double obj = oos.solution.objective;
    const double tol = kGap * std::abs(obj);
    for (const RunResult* other : {&oo, &os}) {
      if (other->has_schedule && other->solution.objective > obj + tol) {
        out.pass = false;
        out.detail += " seed " + std::to_string(2000 + k) + " " + label(other->spec) + " exceeds OOS;";
      }
    }
  }
  out.detail = "20 scenarios x {OOS, OO, OS}-12" + out.detail;
  return out;
}

Outcome segment_monotonicity() {
  Outcome out;
  for (int k = 0; k < 10; ++k) {
    const PlantScenario scn = oracle::random_scenario(3000 + k, {.hours = 48});
    double previous = -std::numeric_limits<double>::infinity();
    int prev_s = 0;
    for (int s : kSupportedSegmentCounts) {
      const RunResult run = solve(ModelKind::kOnOffStandby, s, scn);
      if (!run.has_schedule) {
        out.pass = false;
        out.detail += " seed " + std::to_string(3000 + k) + " S=" + std::to_string(s) + " no schedule;";
        break;
      }
      const double obj = run.solution.objective;
      if (obj < previous - kGap * std::abs(previous)) {
        out.pass = false;
        out.detail += " seed " + std::to_string(3000 + k) + " S=" + std::to_string(prev_s) + "->" +
                      std::to_string(s) + " decreased;";
      }
      previous = obj;
      prev_s = s;
    }
  }
  out.detail = "10 scenarios x S in {1, 2, 4, 8, 12}" + out.detail;
  return out;
}

Outcome breakpoint_operation() {
  Outcome out;
  const PlantScenario ref = reference_plant();
  const PriceRange range = price_range(ref.physics, ref);
  Eigen::VectorXd prices(24);
  for (int t = 0; t < 24; ++t) prices(t) = range.lower + (range.upper - range.lower) * (t + 0.5) / 24.0;
  const PlantScenario scn = unconstrained(prices);
  int on_hours = 0;
  double worst = 0.0;
  for (int s : kSupportedSegmentCounts) {
    const RunResult run = solve(ModelKind::kOnOffStandby, s, scn);
    if (!run.has_schedule) {
      out.pass = false;
      out.detail += " S=" + std::to_string(s) + " no schedule;";
      continue;
    }
    const auto& bp = run.segments.breakpoints;
    for (const auto& h : run.schedule.hours) {
      if (h.state != ElectrolyzerState::kOn) continue;
      ++on_hours;
      double d = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < bp.size(); ++k) d = std::min(d, std::abs(h.consumption_mw - bp(k)));
      worst = std::max(worst, d);
    }
  }
  if (worst > kBreakpointTolMw) out.pass = false;
  std::ostringstream s;
  s << on_hours << " on-hours over 5 segment counts, worst distance to a breakpoint " << worst
    << " MW" << out.detail;
  out.detail = s.str();
  return out;
}

Outcome price_bound_agreement() {
  Outcome out;
  const PlantScenario ref = reference_plant();
  const PriceRange range = price_range(ref.physics, ref);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(range.lower - 20.0, range.upper + 20.0);
  Eigen::VectorXd prices(48);
  for (int t = 0; t < 48; ++t) prices(t) = std::round(u(rng) * 100.0) / 100.0;
  const PlantScenario scn = unconstrained(prices);
  int above = 0, below = 0;
  std::vector<std::vector<double>> decided;
  for (int s : {1, 12}) {
    const RunResult run = solve(ModelKind::kOnOffStandby, s, scn);
    if (!run.has_schedule) {
      out.pass = false;
      out.detail += " S=" + std::to_string(s) + " no schedule;";
      continue;
    }
    std::vector<double> pe;
    for (int t = 0; t < 48; ++t) {
      const double p = run.schedule.hours[t].consumption_mw;
      if (prices(t) > range.upper + kGuardBandEur) {
        if (s == 1) ++above;
        const bool ok = std::abs(p) <= 1e-6 || std::abs(p - scn.standby_load_mw) <= 1e-6;
        if (!ok) {
          out.pass = false;
          out.detail += " S=" + std::to_string(s) + " hour " + std::to_string(t) + " runs above ub;";
        }
        pe.push_back(p > 1e-6 ? scn.standby_load_mw : 0.0);
      } else if (prices(t) < range.lower - kGuardBandEur) {
        if (s == 1) ++below;
        if (std::abs(p - scn.electrolyzer_capacity_mw) > 1e-6) {
          out.pass = false;
          out.detail += " S=" + std::to_string(s) + " hour " + std::to_string(t) + " not at full load;";
        }
        pe.push_back(p);
      }
    }
    decided.push_back(pe);
  }
  std::ostringstream s;
  s << above << " hours above ub+1, " << below << " below lb-1, range [" << range.lower << ", "
    << range.upper << "]" << out.detail;
  out.detail = s.str();
  return out;
}

Outcome expost_surplus() {
  Outcome out;
  // (a) Wind pinned at segment midpoints with prices far below the range: the
  // plant consumes all wind, so every on-hour runs at a midpoint.
  const PlantScenario ref = reference_plant();
  const SegmentSet seg = make_segments(ref.physics, ref.minimum_load_mw, 4);
  const int hours = 2 * seg.size();
  PlantScenario scn = reference_plant();
  scn.daily_demand_kg = 0.0;
  Eigen::VectorXd prices = Eigen::VectorXd::Constant(hours, 5.0);
  Eigen::VectorXd cf(hours);
  std::vector<double> mids;
  for (int t = 0; t < hours; ++t) {
    const Segment& s = seg.segments[t % seg.size()];
    mids.push_back(0.5 * (s.p_lo + s.p_hi));
    cf(t) = mids.back() / scn.wind_capacity_mw;
  }
  set_series(scn, {}, prices, cf);
  const RunResult run = solve(ModelKind::kOnOffStandby, 4, scn);
  double discrepancy = std::numeric_limits<double>::infinity();
  if (run.has_schedule) {
    double expected = 0.0;
    for (int t = 0; t < hours; ++t) expected += approximation_gap(scn.physics, seg, mids[t]);
    discrepancy = std::abs(run.expost.realized_surplus_hydrogen_kg - expected);
  }
  if (!(discrepancy <= kSurplusTolKg)) out.pass = false;

  // (b) Wind-limited scenarios (wind farm no larger than the electrolyzer).
  int violations = 0;
  std::ostringstream trend;
  for (int k = 0; k < 5; ++k) {
    PlantScenario w = oracle::random_scenario(4000 + k, {.hours = 48});
    set_wind_capacity(w, w.electrolyzer_capacity_mw);
    for (auto& b : w.demand) b.min_kg *= 0.5;
    const RunResult one = solve(ModelKind::kOnOffStandby, 1, w);
    const RunResult twelve = solve(ModelKind::kOnOffStandby, 12, w);
    if (!one.has_schedule || !twelve.has_schedule) {
      ++violations;
      continue;
    }
    const double s1 = one.expost.realized_surplus_hydrogen_kg;
    const double s12 = twelve.expost.realized_surplus_hydrogen_kg;
    trend << " " << static_cast<long>(s1) << "->" << static_cast<long>(s12);
    if (s12 > s1 + kSurplusTolKg) ++violations;
  }
  if (violations > 0) out.pass = false;
  std::ostringstream s;
  s << "midpoint discrepancy " << discrepancy << " kg; surplus kg OOS-1->OOS-12:" << trend.str()
    << "; violations " << violations;
  out.detail = s.str();
  return out;
}

Outcome terminal_storage() {
  Outcome out;
  double worst = 0.0;
  for (double level : final_storage_levels) worst = std::max(worst, std::abs(level));
  if (final_storage_levels.empty() || worst > kStorageTolKg) out.pass = false;
  std::ostringstream s;
  s << final_storage_levels.size() << " solved schedules, worst final storage " << worst << " kg";
  out.detail = s.str();
  return out;
}

Outcome physics_sanity() {
  Outcome out;
  const ElectrolyzerPhysics phys = reference_physics();
  const double cap = max_power(phys);
  const OperatingPoint peak = find_peak_efficiency(phys, 0.0);
  const double load = peak.power / cap;
  if (!(load > 0.15 && load < 0.45)) out.pass = false;

  double faraday_excess = -std::numeric_limits<double>::infinity();
  double inversion = 0.0;
  for (int k = 1; k <= kCurveSamples; ++k) {
    const double i = phys.i_max * k / kCurveSamples;
    faraday_excess = std::max(faraday_excess, hydrogen_rate(phys, i) - faraday_limit_rate(phys, i));
    const double p = electrical_power(phys, i);
    inversion = std::max(inversion, std::abs(electrical_power(phys, current_at_power(phys, p)) - p));
  }
  if (faraday_excess > 0.0 || inversion > kInversionTol) out.pass = false;
  std::ostringstream s;
  s << "peak at " << 100.0 * load << "% load, max h - h_faraday " << faraday_excess
    << " kg/h, inversion error " << inversion << " MW";
  out.detail = s.str();
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence (branch-and-bound vs enumeration)", oracle_equivalence},
      {2, "variable-count formulas", variable_counts},
      {3, "model nesting OOS >= OS, OO", model_nesting},
      {4, "segment monotonicity", segment_monotonicity},
      {5, "breakpoint operation", breakpoint_operation},
      {6, "price-bound dispatch agreement", price_bound_agreement},
      {7, "ex-post surplus", expost_surplus},
      {8, "terminal storage empty", terminal_storage},
      {9, "physics sanity", physics_sanity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s [%s] (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("criterion 10 SKIP: annual reproduction needs the external year-long dataset\n");
  return failed == 0 ? 0 : 1;
}
