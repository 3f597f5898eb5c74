#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "h2dispatch/study.hpp"
#include "oracles/random_scenario.hpp"

using namespace h2dispatch;
namespace fs = std::filesystem;

namespace {

const fs::path kData = H2_TEST_DATA_DIR;

PlantScenario bundled() {
  return load_scenario(kData / "default_scenario.json", kData / "prices_synthetic.csv",
                       kData / "wind_synthetic.csv");
}

RunSpec spec(const std::string& text, int hours, int start = 0) {
  RunSpec base;
  base.horizon_start = start;
  base.horizon_hours = hours;
  base.gap = 1e-6;
  base.deterministic = true;
  return parse_label(text, base);
}

bool near_any(double v, std::initializer_list<double> values) {
  return std::any_of(values.begin(), values.end(),
                     [&](double w) { return std::abs(v - w) <= 1e-6; });
}

}  // namespace

TEST(Study, Labels) {
  const RunSpec s = parse_label("os-8");
  EXPECT_EQ(s.model, ModelKind::kOnStandby);
  EXPECT_EQ(s.segments, 8);
  EXPECT_EQ(label(s), "OS-8");
  EXPECT_EQ(label(parse_label("OOS-12")), "OOS-12");
  EXPECT_THROW(parse_label("oos-3"), std::invalid_argument);
  EXPECT_THROW(parse_label("oos"), std::invalid_argument);
  EXPECT_THROW(parse_label("xx-4"), std::invalid_argument);
  RunSpec bad;
  bad.gap = -1.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(Study, SweepTransforms) {
  const PlantScenario base = bundled();
  const PlantScenario windy = apply_sweep(base, SweepAxis::kWindRatio, 8.0);
  EXPECT_DOUBLE_EQ(windy.wind_capacity_mw, 8.0 * 52.25);
  EXPECT_DOUBLE_EQ(windy.wind(5), windy.capacity_factor(5) * 8.0 * 52.25);
  const PlantScenario calm = apply_sweep(base, SweepAxis::kWindRatio, 1.0);
  EXPECT_LE(wind_limited_hours(windy), wind_limited_hours(calm));
  EXPECT_GT(wind_limited_hours(calm), 0);

  const PlantScenario demand = apply_sweep(base, SweepAxis::kDemand, 2.0);
  ASSERT_EQ(demand.demand.size(), base.demand.size());
  for (std::size_t k = 0; k < base.demand.size(); ++k) {
    EXPECT_DOUBLE_EQ(demand.demand[k].min_kg, 2.0 * base.demand[k].min_kg);
  }
  EXPECT_DOUBLE_EQ(apply_sweep(base, SweepAxis::kHydrogenPrice, 5.0).hydrogen_price_eur_kg, 5.0);
  EXPECT_EQ(parse_sweep_axis("wind_ratio"), SweepAxis::kWindRatio);
  EXPECT_STREQ(to_string(SweepAxis::kHydrogenPrice), "hydrogen_price");
  EXPECT_THROW(parse_sweep_axis("tariff"), std::invalid_argument);
}

TEST(Study, RefinedThreeStateModelIsTheBenchmark) {
  const PlantScenario scn = bundled();
  std::vector<RunSpec> specs;
  for (const char* v : {"oos-12", "oos-1", "oo-12", "oo-1", "os-12", "os-1"}) {
    specs.push_back(spec(v, 36, 24));
  }
  const Comparison cmp = run_compare(specs, scn);
  ASSERT_TRUE(cmp.complete());
  ASSERT_EQ(cmp.rows.size(), 6u);
  const CompareRow& oos12 = cmp.rows[0];
  for (const CompareRow& r : cmp.rows) {
    EXPECT_LE(r.estimated_profit_eur, oos12.estimated_profit_eur + 1e-6 * std::abs(oos12.estimated_profit_eur))
        << r.label;
    EXPECT_LE(r.profit_vs_best_pct, 1e-6) << r.label;
  }
  // The state set grows and finer chords dominate coarser ones.
  EXPECT_GE(cmp.rows[0].estimated_profit_eur, cmp.rows[1].estimated_profit_eur - 1e-3);
  EXPECT_GE(cmp.rows[0].estimated_profit_eur, cmp.rows[2].estimated_profit_eur - 1e-3);
  EXPECT_GE(cmp.rows[0].estimated_profit_eur, cmp.rows[4].estimated_profit_eur - 1e-3);

  std::ostringstream csv;
  write_compare_csv(csv, cmp);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  const nlohmann::json j = to_json(cmp, false);
  EXPECT_EQ(j.at("rows").size(), 6u);
}

TEST(Study, DeterministicReportIsReproducible) {
  const PlantScenario scn = bundled();
  const RunResult a = run_single(spec("oos-4", 24), scn);
  const RunResult b = run_single(spec("oos-4", 24), scn);
  ASSERT_EQ(exit_code(a), 0);
  EXPECT_EQ(report_json(a, false).dump(), report_json(b, false).dump());
  EXPECT_FALSE(report_json(a, false).at("solver").contains("wall_time_s"));
  EXPECT_TRUE(report_json(a, true).at("solver").contains("wall_time_s"));
  EXPECT_EQ(report_json(a, false).at("schema"), "h2dispatch.report/1");
}

TEST(Study, ConsumptionLandsOnBreakpointsWithoutBindingConstraints) {
  PlantScenario scn = reference_plant();
  scn.daily_demand_kg = 0.0;
  Eigen::VectorXd prices(24);
  for (int t = 0; t < 24; ++t) prices(t) = 2.5 * t;  // 0 .. 57.5 EUR/MWh
  set_series(scn, {}, prices, Eigen::VectorXd::Ones(24));

  const RunResult coarse = run_single(spec("oos-1", 24), scn);
  ASSERT_TRUE(coarse.has_schedule);
  for (const HourRecord& h : coarse.schedule.hours) {
    EXPECT_TRUE(near_any(h.consumption_mw, {0.0, 0.52, 7.84, 52.25})) << h.consumption_mw;
  }
  const RunResult fine = run_single(spec("oos-12", 24), scn);
  ASSERT_TRUE(fine.has_schedule);
  const Eigen::VectorXd& bp = fine.segments.breakpoints;
  for (const HourRecord& h : fine.schedule.hours) {
    bool ok = near_any(h.consumption_mw, {0.0, 0.52});
    for (Eigen::Index k = 0; k < bp.size(); ++k) ok |= std::abs(h.consumption_mw - bp(k)) <= 1e-6;
    EXPECT_TRUE(ok) << h.consumption_mw;
  }
  // Finer segmentation reaches intermediate set-points the single chord cannot.
  int intermediate = 0;
  for (const HourRecord& h : fine.schedule.hours) {
    intermediate += h.state == ElectrolyzerState::kOn && h.consumption_mw > 7.85 &&
                    h.consumption_mw < 52.24;
  }
  EXPECT_GT(intermediate, 0);
  EXPECT_GE(fine.expost.realized_profit_eur(), coarse.expost.realized_profit_eur() - 1e-6);
}

TEST(Study, FineSegmentationKeepsRunningAtPeakEfficiency) {
  // Prices between h2 price x peak efficiency and the upper bound: running at the
  // peak beats standby, but only the refined curve has the peak as a set-point.
  PlantScenario scn = reference_plant();
  scn.daily_demand_kg = 0.0;
  Eigen::VectorXd prices(24);
  for (int t = 0; t < 24; ++t) prices(t) = (t >= 8 && t < 16) ? 42.0 : 20.0;
  set_series(scn, {}, prices, Eigen::VectorXd::Ones(24));

  const RunResult fine = run_single(spec("oos-12", 24), scn);
  const RunResult coarse = run_single(spec("oos-1", 24), scn);
  ASSERT_TRUE(fine.has_schedule);
  ASSERT_TRUE(coarse.has_schedule);
  const double p_peak = fine.price_range.p_eta_max;
  for (int t = 8; t < 16; ++t) {
    EXPECT_EQ(fine.schedule.hours[t].state, ElectrolyzerState::kOn) << t;
    EXPECT_NEAR(fine.schedule.hours[t].consumption_mw, p_peak, 1e-6) << t;
    EXPECT_EQ(coarse.schedule.hours[t].state, ElectrolyzerState::kStandby) << t;
  }
  EXPECT_EQ(fine.schedule.startups(), 0);
}

TEST(Study, StandbyModelTracksThreeStateModelWithoutPriceSpikes) {
  for (unsigned seed = 0; seed < 4; ++seed) {
    const PlantScenario scn = oracle::random_scenario(
        900 + seed, {.hours = 48, .price_mean = 35, .price_spread = 5, .spike_probability = 0.0});
    const RunResult oos = run_single(spec("oos-4", 48), scn);
    const RunResult os = run_single(spec("os-4", 48), scn);
    ASSERT_TRUE(oos.has_schedule && os.has_schedule);
    const double diff = oos.solution.objective - os.solution.objective;
    EXPECT_GE(diff, -1e-6 * std::abs(oos.solution.objective));
    EXPECT_LT(diff, scn.startup_cost_eur) << seed;
  }
}

TEST(Study, InfeasibleWindowReportsExitCode) {
  PlantScenario scn = reference_plant();
  set_series(scn, {}, Eigen::VectorXd::Constant(24, 30.0), Eigen::VectorXd::Zero(24));
  const RunResult run = run_single(spec("oos-1", 24), scn);
  EXPECT_EQ(run.solution.status, MilpStatus::kInfeasible);
  EXPECT_FALSE(run.has_schedule);
  EXPECT_EQ(exit_code(run), 2);
}

TEST(Study, SweepOverHydrogenPrice) {
  const PlantScenario scn = bundled();
  RunSpec base = spec("oos-12", 24);
  const SweepReport sweep = run_sweep(SweepAxis::kHydrogenPrice, {2.1, 5.0}, scn, base);
  ASSERT_EQ(sweep.points.size(), 2u);
  for (const SweepPoint& p : sweep.points) {
    ASSERT_TRUE(p.ok) << p.error;
    EXPECT_GE(p.fine.estimated_profit_eur, p.coarse.estimated_profit_eur - 1e-3);
  }
  EXPECT_NEAR(sweep.points[1].price_range.upper, sweep.points[0].price_range.upper * 5.0 / 2.1,
              1e-9);
  EXPECT_NEAR(sweep.points[1].price_range.lower, sweep.points[0].price_range.lower * 5.0 / 2.1,
              1e-9);
  std::ostringstream csv;
  write_sweep_csv(csv, sweep);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Study, DoublingDemandShrinksTheHydrogenGapOverAWeek) {
  const PlantScenario scn = bundled();
  const SweepReport sweep = run_sweep(SweepAxis::kDemand, {1.0, 2.0}, scn, spec("oos-12", 168));
  ASSERT_EQ(sweep.points.size(), 2u);
  ASSERT_TRUE(sweep.points[0].ok) << sweep.points[0].error;
  ASSERT_TRUE(sweep.points[1].ok) << sweep.points[1].error;
  EXPECT_GT(sweep.points[0].realized_hydrogen_diff_pct, 0.0);
  EXPECT_LT(sweep.points[1].realized_hydrogen_diff_pct, sweep.points[0].realized_hydrogen_diff_pct);
}

TEST(Study, RunOutputsAreWritten) {
  const PlantScenario scn = bundled();
  const RunResult run = run_single(spec("os-2", 24), scn);
  const fs::path dir = fs::temp_directory_path() / "h2dispatch_study_outputs";
  fs::remove_all(dir);
  write_run_outputs(run, dir);
  for (const char* f : {"schedule.csv", "report.json", "bounds.json", "expost.csv",
                        "price_histogram.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "schedule.csv");
  std::string line;
  int n = -1;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) EXPECT_NE(field, "-0") << line;
  }
  EXPECT_EQ(n, 24);
  fs::remove_all(dir);
}
