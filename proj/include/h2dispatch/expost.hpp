#pragma once

// Ex-post evaluation: true hydrogen output at the optimized set-points versus
// the piecewise estimate the optimizer planned with.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "h2dispatch/models.hpp"
#include "h2dispatch/physics.hpp"
#include "h2dispatch/scenario.hpp"

namespace h2dispatch {

struct ExPostReport {
  double estimated_profit_eur = 0.0;
  double realized_surplus_profit_eur = 0.0;
  double estimated_hydrogen_kg = 0.0;
  double realized_surplus_hydrogen_kg = 0.0;
  std::vector<double> estimated_kg;  // per hour, piecewise production
  std::vector<double> realized_kg;   // per hour, true curve
  std::vector<double> delta_kg;      // realized - estimated, zero unless on
  /// Compression energy the surplus would need. Informative only: it is not
  /// charged against the surplus profit.
  double extra_compressor_mwh = 0.0;

  double realized_profit_eur() const { return estimated_profit_eur + realized_surplus_profit_eur; }
  double realized_hydrogen_kg() const { return estimated_hydrogen_kg + realized_surplus_hydrogen_kg; }
};

/// Re-evaluates every on-hour on the nonlinear curve. Surplus hydrogen is valued
/// at the hydrogen price without re-optimizing storage or deliveries.
/// Throws IntegrityError when an on-hour's production power lies outside [P_min, C_e].
ExPostReport evaluate(const DispatchSchedule& schedule, const ElectrolyzerPhysics& phys,
                      const PlantScenario& scn, double tol = 1e-6);

void to_json(nlohmann::json& j, const ExPostReport& report);
/// Columns: hour,estimated_kg,realized_kg,delta_kg.
void write_expost_csv(std::ostream& out, const ExPostReport& report);

}  // namespace h2dispatch
