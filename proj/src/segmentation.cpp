#include "h2dispatch/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "h2dispatch/errors.hpp"

namespace h2dispatch {
namespace {

constexpr int kConcavitySamples = 64;

std::vector<double> split_at_midpoints(const std::vector<double>& pts, const std::vector<int>& which) {
  std::vector<double> out = pts;
  for (int s : which) out.push_back(0.5 * (pts[s] + pts[s + 1]));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> all_segments(const std::vector<double>& pts) {
  std::vector<int> idx(pts.size() - 1);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

bool is_supported_segment_count(int n) {
  return std::find(std::begin(kSupportedSegmentCounts), std::end(kSupportedSegmentCounts), n) !=
         std::end(kSupportedSegmentCounts);
}

int SegmentSet::locate(double p) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(p_max()));
  for (int s = 0; s < size(); ++s) {
    if (p >= segments[s].p_lo - tol && p <= segments[s].p_hi + tol) return s;
  }
  return -1;
}

double SegmentSet::evaluate(double p) const {
  const int s = locate(p);
  if (s < 0) {
    throw DomainError("piecewise curve evaluated at " + std::to_string(p) + " MW outside [" +
                      std::to_string(p_min()) + ", " + std::to_string(p_max()) + "]");
  }
  return segments[s].value(p);
}

Eigen::VectorXd build_breakpoints(const ElectrolyzerPhysics& phys, double p_min, int n_segments,
                                  std::vector<std::string>* notes) {
  if (!is_supported_segment_count(n_segments)) {
    throw std::invalid_argument("unsupported segment count " + std::to_string(n_segments) +
                                "; expected one of 1, 2, 4, 8, 12");
  }
  const double cap = max_power(phys);
  if (!(p_min > 0.0 && p_min < cap)) {
    throw DomainError("minimum load must lie in (0, C_e)");
  }

  std::vector<double> pts{p_min, cap};
  if (n_segments >= 2) {
    const double p_peak = find_peak_efficiency(phys, p_min).power;
    if (!(p_peak > p_min && p_peak < cap)) {
      throw DomainError("efficiency peak " + std::to_string(p_peak) +
                        " MW is not strictly inside (P_min, C_e)");
    }
    pts = {p_min, p_peak, cap};
    if (n_segments >= 4) pts = split_at_midpoints(pts, all_segments(pts));
    if (n_segments >= 8) pts = split_at_midpoints(pts, all_segments(pts));
    if (n_segments == 12) {
      // Prefer segments right of the peak, widest first, rightmost on ties.
      std::vector<int> order = all_segments(pts);
      const double tol = 1e-9 * cap;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const bool ra = pts[a] >= p_peak - tol;
        const bool rb = pts[b] >= p_peak - tol;
        if (ra != rb) return ra;
        const double wa = pts[a + 1] - pts[a];
        const double wb = pts[b + 1] - pts[b];
        if (std::abs(wa - wb) > tol) return wa > wb;
        return a > b;
      });
      const int right = static_cast<int>(std::count_if(
          order.begin(), order.end(), [&](int s) { return pts[s] >= p_peak - tol; }));
      order.resize(4);
      pts = split_at_midpoints(pts, order);
      if (notes) {
        std::ostringstream msg;
        msg << "12-segment set: midpoint split of " << (right >= 4 ? "the" : "the widest")
            << " 4 segments right of the efficiency peak";
        if (right < 4) msg << " (only " << right << " right of the peak; remainder taken by width)";
        notes->push_back(msg.str());
      }
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
}

SegmentSet linearize(const ElectrolyzerPhysics& phys, const Eigen::VectorXd& breakpoints) {
  if (breakpoints.size() < 2) throw std::invalid_argument("linearize: need at least 2 breakpoints");
  for (Eigen::Index k = 1; k < breakpoints.size(); ++k) {
    if (!(breakpoints(k) > breakpoints(k - 1))) {
      throw std::invalid_argument("linearize: breakpoints must be strictly increasing");
    }
  }

  SegmentSet set;
  set.breakpoints = breakpoints;
  Eigen::VectorXd h(breakpoints.size());
  for (Eigen::Index k = 0; k < breakpoints.size(); ++k) h(k) = hydrogen_at_power(phys, breakpoints(k));

  for (Eigen::Index k = 0; k + 1 < breakpoints.size(); ++k) {
    Segment s;
    s.p_lo = breakpoints(k);
    s.p_hi = breakpoints(k + 1);
    s.slope = (h(k + 1) - h(k)) / (s.p_hi - s.p_lo);
    s.intercept = h(k) - s.slope * s.p_lo;
    for (int j = 1; j < kConcavitySamples; ++j) {
      const double p = s.p_lo + (s.p_hi - s.p_lo) * j / kConcavitySamples;
      const double truth = hydrogen_at_power(phys, p);
      if (s.value(p) > truth + 1e-9 * std::max(1.0, std::abs(truth))) {
        s.underestimates = false;
        break;
      }
    }
    if (!s.underestimates) {
      std::ostringstream msg;
      msg << "warning: curve not concave on [" << s.p_lo << ", " << s.p_hi
          << "] MW; segment overestimates production between breakpoints";
      set.notes.push_back(msg.str());
    }
    set.segments.push_back(s);
  }
  return set;
}

SegmentSet make_segments(const ElectrolyzerPhysics& phys, double p_min, int n_segments) {
  std::vector<std::string> notes;
  SegmentSet set = linearize(phys, build_breakpoints(phys, p_min, n_segments, &notes));
  set.notes.insert(set.notes.begin(), notes.begin(), notes.end());
  return set;
}

double approximation_gap(const ElectrolyzerPhysics& phys, const SegmentSet& seg, double p) {
  return hydrogen_at_power(phys, p) - seg.evaluate(p);
}

double max_approximation_gap(const ElectrolyzerPhysics& phys, const SegmentSet& seg, int samples) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double p = seg.p_min() + (seg.p_max() - seg.p_min()) * k / (samples - 1);
    worst = std::max(worst, approximation_gap(phys, seg, p));
  }
  return worst;
}

void to_json(nlohmann::json& j, const SegmentSet& seg) {
  j = nlohmann::json::object();
  j["breakpoints_mw"] = std::vector<double>(seg.breakpoints.data(),
                                            seg.breakpoints.data() + seg.breakpoints.size());
  auto& arr = j["segments"] = nlohmann::json::array();
  for (const auto& s : seg.segments) {
    arr.push_back({{"slope_kg_mwh", s.slope},
                   {"intercept_kg_h", s.intercept},
                   {"p_lo_mw", s.p_lo},
                   {"p_hi_mw", s.p_hi},
                   {"underestimates", s.underestimates}});
  }
  j["notes"] = seg.notes;
}

void from_json(const nlohmann::json& j, SegmentSet& seg) {
  auto fail = [](const std::string& msg) { throw ParseError("segments", 0, msg); };
  if (!j.is_object() || !j.contains("breakpoints_mw") || !j.contains("segments")) {
    fail("expected object with 'breakpoints_mw' and 'segments'");
  }
  const auto bp = j.at("breakpoints_mw").get<std::vector<double>>();
  if (bp.size() < 2) fail("need at least two breakpoints");
  for (std::size_t k = 1; k < bp.size(); ++k) {
    if (!(bp[k] > bp[k - 1])) fail("breakpoints must be strictly increasing");
  }
  const auto& arr = j.at("segments");
  if (!arr.is_array() || arr.size() != bp.size() - 1) fail("need one segment per breakpoint interval");

  SegmentSet out;
  out.breakpoints = Eigen::Map<const Eigen::VectorXd>(bp.data(), static_cast<Eigen::Index>(bp.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    Segment s;
    s.slope = arr[k].at("slope_kg_mwh").get<double>();
    s.intercept = arr[k].at("intercept_kg_h").get<double>();
    s.p_lo = arr[k].at("p_lo_mw").get<double>();
    s.p_hi = arr[k].at("p_hi_mw").get<double>();
    s.underestimates = arr[k].value("underestimates", true);
    if (!std::isfinite(s.slope) || !std::isfinite(s.intercept)) fail("non-finite segment coefficient");
    if (s.p_lo != bp[k] || s.p_hi != bp[k + 1]) {
      fail("segment " + std::to_string(k) + " is not contiguous with the breakpoints");
    }
    out.segments.push_back(s);
  }
  if (j.contains("notes")) out.notes = j.at("notes").get<std::vector<std::string>>();
  seg = std::move(out);
}

}  // namespace h2dispatch
