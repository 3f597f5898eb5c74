#pragma once

// Day-ahead price range in which the number of linearization segments can
// change the optimal dispatch, assuming ample wind and no binding demand.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "h2dispatch/physics.hpp"
#include "h2dispatch/scenario.hpp"

namespace h2dispatch {

struct PriceRange {
  double lower = 0.0;                    // EUR/MWh
  double upper = 0.0;                    // EUR/MWh
  double eta_max = 0.0;                  // kg/MWh, peak efficiency
  double eta_fl = 0.0;                   // kg/MWh, efficiency at full load
  double p_eta_max = 0.0;                // MW, power at peak efficiency
  double derivative_at_full_load = 0.0;  // (kg/MWh)/MW
};

/// Relative backward-difference step (fraction of C_e) for the efficiency slope.
inline constexpr double kDefaultSlopeStep = 1e-3;

/// Price above which standby (or off) beats running at peak efficiency.
/// Throws DomainError unless the peak power exceeds the standby load.
double upper_bound(const ElectrolyzerPhysics& phys, const PlantScenario& scn);

/// Price below which full load is optimal for any segmentation.
double lower_bound(const ElectrolyzerPhysics& phys, const PlantScenario& scn,
                   double relative_step = kDefaultSlopeStep);

/// Backward-difference slope of the efficiency curve at C_e.
double efficiency_slope_at_full_load(const ElectrolyzerPhysics& phys, double relative_step);

PriceRange price_range(const ElectrolyzerPhysics& phys, const PlantScenario& scn,
                       double relative_step = kDefaultSlopeStep);

enum class PriceClass : std::uint8_t { kBelow, kInside, kAbove };
const char* to_string(PriceClass c);

/// Closed interval: prices equal to a bound are inside.
PriceClass classify(const PriceRange& range, double price);
std::vector<PriceClass> classify_hours(const PriceRange& range, const Eigen::VectorXd& prices);

struct PriceHistogram {
  std::vector<double> edges;  // size counts + 1, EUR/MWh
  std::vector<int> counts;
  int below = 0;
  int inside = 0;
  int above = 0;
};

/// Fixed-width bins aligned to multiples of `bin_width` covering all prices.
PriceHistogram price_histogram(const PriceRange& range, const Eigen::VectorXd& prices,
                               double bin_width = 5.0);

void to_json(nlohmann::json& j, const PriceRange& range);
/// Columns: bin_lo_eur_mwh,bin_hi_eur_mwh,count.
void write_histogram_csv(std::ostream& out, const PriceHistogram& hist);

}  // namespace h2dispatch
