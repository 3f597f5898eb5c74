#include "h2dispatch/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "h2dispatch/errors.hpp"

namespace h2dispatch {

double upper_bound(const ElectrolyzerPhysics& phys, const PlantScenario& scn) {
  const OperatingPoint peak = find_peak_efficiency(phys, scn.minimum_load_mw);
  if (!(peak.power > scn.standby_load_mw)) {
    throw DomainError("upper price bound undefined: peak-efficiency power does not exceed the "
                      "standby load");
  }
  return scn.hydrogen_price_eur_kg * peak.efficiency * peak.power /
         (peak.power - scn.standby_load_mw);
}

double efficiency_slope_at_full_load(const ElectrolyzerPhysics& phys, double relative_step) {
  if (!(relative_step > 0.0 && relative_step < 1.0)) {
    throw std::invalid_argument("slope step must lie in (0, 1)");
  }
  const double cap = max_power(phys);
  const double step = relative_step * cap;
  return (efficiency_at_power(phys, cap) - efficiency_at_power(phys, cap - step)) / step;
}

double lower_bound(const ElectrolyzerPhysics& phys, const PlantScenario& scn,
                   double relative_step) {
  const double cap = max_power(phys);
  return scn.hydrogen_price_eur_kg *
         (efficiency_at_power(phys, cap) + cap * efficiency_slope_at_full_load(phys, relative_step));
}

PriceRange price_range(const ElectrolyzerPhysics& phys, const PlantScenario& scn,
                       double relative_step) {
  const OperatingPoint peak = find_peak_efficiency(phys, scn.minimum_load_mw);
  PriceRange r;
  r.eta_max = peak.efficiency;
  r.p_eta_max = peak.power;
  r.eta_fl = efficiency_at_power(phys, max_power(phys));
  r.derivative_at_full_load = efficiency_slope_at_full_load(phys, relative_step);
  r.upper = upper_bound(phys, scn);
  r.lower = lower_bound(phys, scn, relative_step);
  return r;
}

const char* to_string(PriceClass c) {
  switch (c) {
    case PriceClass::kBelow: return "below";
    case PriceClass::kInside: return "inside";
    case PriceClass::kAbove: return "above";
  }
  return "?";
}

PriceClass classify(const PriceRange& range, double price) {
  if (price < range.lower) return PriceClass::kBelow;
  if (price > range.upper) return PriceClass::kAbove;
  return PriceClass::kInside;
}

std::vector<PriceClass> classify_hours(const PriceRange& range, const Eigen::VectorXd& prices) {
  std::vector<PriceClass> out(prices.size());
  for (Eigen::Index t = 0; t < prices.size(); ++t) out[t] = classify(range, prices(t));
  return out;
}

PriceHistogram price_histogram(const PriceRange& range, const Eigen::VectorXd& prices,
                               double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram bin width must be > 0");
  PriceHistogram h;
  for (PriceClass c : classify_hours(range, prices)) {
    if (c == PriceClass::kBelow) ++h.below;
    else if (c == PriceClass::kInside) ++h.inside;
    else ++h.above;
  }
  if (prices.size() == 0) return h;
  const double lo = std::floor(prices.minCoeff() / bin_width);
  const double hi = std::floor(prices.maxCoeff() / bin_width) + 1.0;
  const int bins = static_cast<int>(hi - lo);
  h.counts.assign(bins, 0);
  for (int k = 0; k <= bins; ++k) h.edges.push_back((lo + k) * bin_width);
  for (Eigen::Index t = 0; t < prices.size(); ++t) {
    const int k = static_cast<int>(std::floor(prices(t) / bin_width) - lo);
    ++h.counts[std::clamp(k, 0, bins - 1)];
  }
  return h;
}

void to_json(nlohmann::json& j, const PriceRange& range) {
  j = {{"lower_eur_mwh", range.lower},
       {"upper_eur_mwh", range.upper},
       {"eta_max_kg_mwh", range.eta_max},
       {"eta_full_load_kg_mwh", range.eta_fl},
       {"p_eta_max_mw", range.p_eta_max},
       {"efficiency_slope_at_full_load", range.derivative_at_full_load}};
}

void write_histogram_csv(std::ostream& out, const PriceHistogram& hist) {
  out << "bin_lo_eur_mwh,bin_hi_eur_mwh,count\n";
  char buf[96];
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", hist.edges[k], hist.edges[k + 1],
                  hist.counts[k]);
    out << buf;
  }
}

}  // namespace h2dispatch
