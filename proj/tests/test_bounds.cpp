#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "h2dispatch/bounds.hpp"
#include "h2dispatch/errors.hpp"
#include "h2dispatch/models.hpp"

using namespace h2dispatch;

namespace {

// Frozen from a 40-digit mpmath evaluation of the same formulas (peak found by
// a high-precision maximization, slope by the same backward difference).
constexpr double kUpper = 43.055381289952685;
constexpr double kLower = 30.984261047003582;
constexpr double kLowerExactSlope = 30.986223829074822;
constexpr double kExactSlope = -0.053424868095110989;  // analytic derivative at full load
// Price where running at peak efficiency and standby break even on the true curve.
constexpr double kStandbyThreshold = 43.193288556590862;

PlantScenario one_hour(double price) {
  PlantScenario scn = reference_plant();
  scn.daily_demand_kg = 0.0;
  set_series(scn, {}, Eigen::VectorXd::Constant(1, price), Eigen::VectorXd::Ones(1));
  return scn;
}

}  // namespace

TEST(Bounds, ReferenceValues) {
  const PlantScenario scn = reference_plant();
  const PriceRange r = price_range(scn.physics, scn);
  EXPECT_NEAR(r.upper, kUpper, 1e-7);
  EXPECT_NEAR(r.lower, kLower, 1e-7);
  // Backward difference: first-order error in the step.
  EXPECT_NEAR(r.derivative_at_full_load, kExactSlope, 1e-4);
  EXPECT_LT(r.derivative_at_full_load, kExactSlope);
  EXPECT_NEAR(r.eta_max, 19.779136841044509, 1e-8);
  EXPECT_NEAR(r.p_eta_max, 14.737287926596455, 1e-6);
  EXPECT_NEAR(r.eta_fl, 17.546794038481369, 1e-10);
  EXPECT_LT(r.lower, r.upper);
  // The backward difference sits within 0.01 EUR of the analytic slope.
  EXPECT_NEAR(r.lower, kLowerExactSlope, 0.01);
}

TEST(Bounds, SlopeStepConverges) {
  const PlantScenario scn = reference_plant();
  const double coarse = lower_bound(scn.physics, scn, 1e-3);
  const double fine = lower_bound(scn.physics, scn, 5e-4);
  EXPECT_LT(std::abs(fine - coarse) / std::abs(coarse), 1e-3);
  EXPECT_LT(std::abs(fine - kLowerExactSlope), std::abs(coarse - kLowerExactSlope));
  EXPECT_THROW(efficiency_slope_at_full_load(scn.physics, 0.0), std::invalid_argument);
  EXPECT_THROW(efficiency_slope_at_full_load(scn.physics, 1.0), std::invalid_argument);
}

TEST(Bounds, LinearInHydrogenPrice) {
  PlantScenario scn = reference_plant();
  const PriceRange base = price_range(scn.physics, scn);
  scn.hydrogen_price_eur_kg = 5.0;
  const PriceRange scaled = price_range(scn.physics, scn);
  EXPECT_NEAR(scaled.upper, base.upper * 5.0 / 2.1, 1e-9);
  EXPECT_NEAR(scaled.lower, base.lower * 5.0 / 2.1, 1e-9);
}

TEST(Bounds, VanishingStandbyLoadGivesPeakValue) {
  PlantScenario scn = reference_plant();
  scn.standby_load_mw = 1e-9;
  const PriceRange r = price_range(scn.physics, scn);
  EXPECT_NEAR(r.upper, 2.1 * r.eta_max, 1e-6);
  scn.standby_load_mw = 20.0;  // above the peak power
  EXPECT_THROW(upper_bound(scn.physics, scn), DomainError);
}

TEST(Bounds, FlatCurveLowerBoundIsFullLoadValue) {
  PlantScenario scn = reference_plant();
  ElectrolyzerPhysics phys = scn.physics;
  phys.k1 = 1e-12;
  phys.k2 = 1e-9;
  phys.faraday_f1 = 0.0;
  phys.faraday_f2 = 1.0;
  phys = calibrate_area(phys, 52.25);
  const PriceRange r = price_range(phys, scn);
  EXPECT_NEAR(r.derivative_at_full_load, 0.0, 1e-7);
  EXPECT_NEAR(r.lower, 2.1 * r.eta_fl, 1e-6);
}

TEST(Bounds, StandbyThresholdBracketsTheUpperBound) {
  // True-curve profit of one hour at peak efficiency vs standby, both with ample wind.
  const PlantScenario scn = reference_plant();
  const PriceRange r = price_range(scn.physics, scn);
  auto peak_minus_standby = [&](double price) {
    return 2.1 * r.eta_max * r.p_eta_max - price * r.p_eta_max + price * scn.standby_load_mw;
  };
  EXPECT_NEAR(peak_minus_standby(r.upper), 0.0, 1e-9);
  EXPECT_GT(peak_minus_standby(r.upper - 1.0), 0.0);
  EXPECT_LT(peak_minus_standby(r.upper + 1.0), 0.0);
  EXPECT_GT(kStandbyThreshold, r.upper);
  EXPECT_LT(kStandbyThreshold, r.upper + 1.0);
}

TEST(Bounds, DispatchAgreesAcrossSegmentationsOutsideTheRange) {
  const PlantScenario base = reference_plant();
  const PriceRange r = price_range(base.physics, base);
  for (int s : kSupportedSegmentCounts) {
    const SegmentSet seg = make_segments(base.physics, base.minimum_load_mw, s);
    {
      const PlantScenario scn = one_hour(r.lower - 1.0);
      const MilpSolution sol = solve_milp(build_os(scn, seg));
      const DispatchSchedule d = decode_solution(build_os(scn, seg), ModelKind::kOnStandby, scn,
                                                 seg, sol.values);
      EXPECT_EQ(d.hours[0].state, ElectrolyzerState::kOn) << s;
      EXPECT_NEAR(d.hours[0].consumption_mw, 52.25, 1e-6) << s;
    }
    {
      const PlantScenario scn = one_hour(r.upper + 1.0);
      const MilpSolution sol = solve_milp(build_os(scn, seg));
      const DispatchSchedule d = decode_solution(build_os(scn, seg), ModelKind::kOnStandby, scn,
                                                 seg, sol.values);
      EXPECT_EQ(d.hours[0].state, ElectrolyzerState::kStandby) << s;
    }
  }
}

TEST(Bounds, ClassificationIsClosed) {
  PriceRange r;
  r.lower = 30.0;
  r.upper = 40.0;
  EXPECT_EQ(classify(r, 29.999), PriceClass::kBelow);
  EXPECT_EQ(classify(r, 30.0), PriceClass::kInside);
  EXPECT_EQ(classify(r, 40.0), PriceClass::kInside);
  EXPECT_EQ(classify(r, 40.001), PriceClass::kAbove);
  EXPECT_STREQ(to_string(PriceClass::kInside), "inside");
}

TEST(Bounds, Histogram) {
  PriceRange r;
  r.lower = 30.0;
  r.upper = 40.0;
  Eigen::VectorXd prices(7);
  prices << -3.0, 0.0, 12.0, 30.0, 35.0, 40.0, 41.0;
  const PriceHistogram h = price_histogram(r, prices, 5.0);
  EXPECT_EQ(h.below, 3);
  EXPECT_EQ(h.inside, 3);
  EXPECT_EQ(h.above, 1);
  ASSERT_EQ(h.edges.size(), h.counts.size() + 1);
  EXPECT_DOUBLE_EQ(h.edges.front(), -5.0);
  EXPECT_GT(h.edges.back(), 41.0);
  int total = 0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    EXPECT_DOUBLE_EQ(h.edges[k + 1] - h.edges[k], 5.0);
    EXPECT_DOUBLE_EQ(std::fmod(h.edges[k], 5.0), 0.0);
    total += h.counts[k];
  }
  EXPECT_EQ(total, 7);
  EXPECT_THROW(price_histogram(r, prices, 0.0), std::invalid_argument);
  std::ostringstream csv;
  write_histogram_csv(csv, h);
  EXPECT_EQ(csv.str().rfind("bin_lo_eur_mwh,bin_hi_eur_mwh,count\n", 0), 0u);
}
