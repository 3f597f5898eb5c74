#include <gtest/gtest.h>

#include <algorithm>

#include "h2dispatch/errors.hpp"
#include "h2dispatch/scenario.hpp"
#include "h2dispatch/segmentation.hpp"

using namespace h2dispatch;

namespace {

const ElectrolyzerPhysics& phys() {
  static const ElectrolyzerPhysics p = reference_physics();
  return p;
}
constexpr double kPmin = 7.84;
constexpr double kCap = 52.25;

bool contains(const Eigen::VectorXd& v, double x) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k) - x) <= 1e-12 * kCap) return true;
  }
  return false;
}

}  // namespace

TEST(Segmentation, BreakpointCountsAndEnds) {
  for (int n : kSupportedSegmentCounts) {
    const Eigen::VectorXd bp = build_breakpoints(phys(), kPmin, n);
    ASSERT_EQ(bp.size(), n + 1);
    EXPECT_DOUBLE_EQ(bp(0), kPmin);
    EXPECT_NEAR(bp(n), kCap, 1e-12);
    for (int k = 1; k <= n; ++k) EXPECT_GT(bp(k), bp(k - 1));
  }
  EXPECT_THROW(build_breakpoints(phys(), kPmin, 3), std::invalid_argument);
  EXPECT_THROW(build_breakpoints(phys(), 0.0, 2), DomainError);
  EXPECT_THROW(build_breakpoints(phys(), kCap, 2), DomainError);
}

TEST(Segmentation, RefinementIsNested) {
  const int chain[] = {1, 2, 4, 8, 12};
  for (int k = 1; k < 5; ++k) {
    const Eigen::VectorXd coarse = build_breakpoints(phys(), kPmin, chain[k - 1]);
    const Eigen::VectorXd fine = build_breakpoints(phys(), kPmin, chain[k]);
    for (Eigen::Index j = 0; j < coarse.size(); ++j) EXPECT_TRUE(contains(fine, coarse(j)));
  }
}

TEST(Segmentation, TwoSegmentsSplitAtPeak) {
  const Eigen::VectorXd bp = build_breakpoints(phys(), kPmin, 2);
  EXPECT_NEAR(bp(1), find_peak_efficiency(phys(), kPmin).power, 1e-12);
}

TEST(Segmentation, TwelveSegmentsRefineRightOfPeak) {
  std::vector<std::string> notes;
  const Eigen::VectorXd eight = build_breakpoints(phys(), kPmin, 8);
  const Eigen::VectorXd twelve = build_breakpoints(phys(), kPmin, 12, &notes);
  const double peak = find_peak_efficiency(phys(), kPmin).power;
  int added_right = 0;
  for (Eigen::Index k = 0; k < twelve.size(); ++k) {
    if (!contains(eight, twelve(k)) && twelve(k) > peak) ++added_right;
  }
  EXPECT_EQ(added_right, 4);
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_NE(notes[0].find("right of the efficiency peak"), std::string::npos);
}

TEST(Segmentation, ChordsExactAtBreakpointsAndUnderestimateBetween) {
  for (int n : kSupportedSegmentCounts) {
    const SegmentSet seg = make_segments(phys(), kPmin, n);
    ASSERT_EQ(seg.size(), n);
    for (Eigen::Index k = 0; k < seg.breakpoints.size(); ++k) {
      EXPECT_NEAR(approximation_gap(phys(), seg, seg.breakpoints(k)), 0.0, 1e-9);
    }
    for (const Segment& s : seg.segments) {
      EXPECT_TRUE(s.underestimates);
      EXPECT_GT(s.slope, 0.0);
      for (int j = 1; j < 20; ++j) {
        const double p = s.p_lo + (s.p_hi - s.p_lo) * j / 20.0;
        EXPECT_GE(approximation_gap(phys(), seg, p), -1e-9);
      }
    }
  }
}

TEST(Segmentation, SlopesDecreaseOnConcaveCurve) {
  const SegmentSet seg = make_segments(phys(), kPmin, 12);
  for (int s = 1; s < seg.size(); ++s) EXPECT_LT(seg.segments[s].slope, seg.segments[s - 1].slope);
}

TEST(Segmentation, GapShrinksWithRefinement) {
  double prev = std::numeric_limits<double>::infinity();
  for (int n : kSupportedSegmentCounts) {
    const double g = max_approximation_gap(phys(), make_segments(phys(), kPmin, n), 2001);
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(Segmentation, PointwiseDominanceOfFinerSets) {
  const int chain[] = {1, 2, 4, 8, 12};
  for (int k = 1; k < 5; ++k) {
    const SegmentSet coarse = make_segments(phys(), kPmin, chain[k - 1]);
    const SegmentSet fine = make_segments(phys(), kPmin, chain[k]);
    for (int j = 0; j <= 500; ++j) {
      const double p = kPmin + (kCap - kPmin) * j / 500.0;
      EXPECT_GE(fine.evaluate(p), coarse.evaluate(p) - 1e-9);
    }
  }
}

TEST(Segmentation, LocateAndEvaluate) {
  const SegmentSet seg = make_segments(phys(), kPmin, 4);
  EXPECT_EQ(seg.locate(seg.breakpoints(1)), 0);
  EXPECT_EQ(seg.locate(kCap), 3);
  EXPECT_EQ(seg.locate(kPmin - 1.0), -1);
  EXPECT_THROW(seg.evaluate(kCap + 1.0), DomainError);
}

TEST(Segmentation, LinearizeValidatesInput) {
  Eigen::VectorXd one(1);
  one << 10.0;
  EXPECT_THROW(linearize(phys(), one), std::invalid_argument);
  Eigen::VectorXd unordered(3);
  unordered << 10.0, 9.0, 20.0;
  EXPECT_THROW(linearize(phys(), unordered), std::invalid_argument);
}

TEST(Segmentation, JsonRoundTrip) {
  const SegmentSet seg = make_segments(phys(), kPmin, 12);
  const nlohmann::json j = seg;
  const SegmentSet back = j.get<SegmentSet>();
  ASSERT_EQ(back.size(), seg.size());
  EXPECT_TRUE(back.breakpoints == seg.breakpoints);
  for (int s = 0; s < seg.size(); ++s) {
    EXPECT_EQ(back.segments[s].slope, seg.segments[s].slope);
    EXPECT_EQ(back.segments[s].intercept, seg.segments[s].intercept);
  }
  EXPECT_EQ(back.notes, seg.notes);

  nlohmann::json broken = j;
  broken["segments"][3]["p_lo_mw"] = 1.0;
  EXPECT_THROW(broken.get<SegmentSet>(), ParseError);
  broken = j;
  broken["segments"].erase(0);
  EXPECT_THROW(broken.get<SegmentSet>(), ParseError);
}
