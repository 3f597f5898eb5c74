#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "h2dispatch/physics.hpp"

namespace h2dispatch {

/// One linear piece h ~= slope * p + intercept, valid on [p_lo, p_hi].
struct Segment {
  double slope = 0.0;      // kg/MWh
  double intercept = 0.0;  // kg/h
  double p_lo = 0.0;       // MW
  double p_hi = 0.0;       // MW
  bool underestimates = true;  // line stays below the true curve on the segment

  double value(double p) const { return slope * p + intercept; }
};

/// Piecewise-linear hydrogen production curve.
struct SegmentSet {
  Eigen::VectorXd breakpoints;
  std::vector<Segment> segments;
  /// Construction rule and concavity warnings, carried into reports.
  std::vector<std::string> notes;

  int size() const { return static_cast<int>(segments.size()); }
  double p_min() const { return breakpoints(0); }
  double p_max() const { return breakpoints(breakpoints.size() - 1); }
  /// Index of the segment containing p (lowest index on shared breakpoints); -1 if outside.
  int locate(double p) const;
  /// Piecewise value at p in [p_min, p_max].
  double evaluate(double p) const;
};

/// Segment counts produced by the refinement chain 1 -> 2 -> 4 -> 8 -> 12.
inline constexpr int kSupportedSegmentCounts[] = {1, 2, 4, 8, 12};

bool is_supported_segment_count(int n);

/// Breakpoints for n in {1, 2, 4, 8, 12}: {P_min, C_e}, then the efficiency peak,
/// then midpoint splits (right of the peak only for 8 -> 12).
Eigen::VectorXd build_breakpoints(const ElectrolyzerPhysics& phys, double p_min, int n_segments,
                                  std::vector<std::string>* notes = nullptr);

/// Chords of the true curve between consecutive breakpoints.
SegmentSet linearize(const ElectrolyzerPhysics& phys, const Eigen::VectorXd& breakpoints);

/// build_breakpoints + linearize.
SegmentSet make_segments(const ElectrolyzerPhysics& phys, double p_min, int n_segments);

/// True curve minus piecewise curve at p [kg/h].
double approximation_gap(const ElectrolyzerPhysics& phys, const SegmentSet& seg, double p);

/// Largest approximation gap over a uniform grid of `samples` points.
double max_approximation_gap(const ElectrolyzerPhysics& phys, const SegmentSet& seg,
                             int samples = kCurveSamples);

void to_json(nlohmann::json& j, const SegmentSet& seg);
/// Validates contiguity and ordering; throws ParseError on malformed input.
void from_json(const nlohmann::json& j, SegmentSet& seg);

}  // namespace h2dispatch
