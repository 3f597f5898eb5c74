#include "h2dispatch/expost.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "h2dispatch/errors.hpp"

namespace h2dispatch {

ExPostReport evaluate(const DispatchSchedule& schedule, const ElectrolyzerPhysics& phys,
                      const PlantScenario& scn, double tol) {
  ExPostReport rep;
  const int n = static_cast<int>(schedule.hours.size());
  rep.estimated_profit_eur = schedule.objective;
  rep.estimated_kg.assign(n, 0.0);
  rep.realized_kg.assign(n, 0.0);
  rep.delta_kg.assign(n, 0.0);

  const double p_min = scn.minimum_load_mw;
  const double cap = scn.electrolyzer_capacity_mw;
  for (int t = 0; t < n; ++t) {
    const HourRecord& h = schedule.hours[t];
    rep.estimated_kg[t] = h.hydrogen_kg;
    rep.estimated_hydrogen_kg += h.hydrogen_kg;
    if (h.state != ElectrolyzerState::kOn) continue;
    // On-hours carry no standby load, so consumption is the production power.
    const double p = h.consumption_mw;
    if (p < p_min - tol || p > cap + tol) {
      std::ostringstream msg;
      msg << "hour " << t << ": on-state power " << p << " MW outside [" << p_min << ", " << cap
          << "]";
      throw IntegrityError("expost_power_t" + std::to_string(t), msg.str());
    }
    rep.realized_kg[t] = hydrogen_at_power(phys, std::clamp(p, p_min, cap));
    rep.delta_kg[t] = rep.realized_kg[t] - h.hydrogen_kg;
    rep.realized_surplus_hydrogen_kg += rep.delta_kg[t];
  }
  rep.realized_surplus_profit_eur = scn.hydrogen_price_eur_kg * rep.realized_surplus_hydrogen_kg;
  rep.extra_compressor_mwh = scn.compressor_mwh_kg * rep.realized_surplus_hydrogen_kg;
  return rep;
}

void to_json(nlohmann::json& j, const ExPostReport& report) {
  j = {{"estimated_profit_eur", report.estimated_profit_eur},
       {"realized_surplus_profit_eur", report.realized_surplus_profit_eur},
       {"realized_profit_eur", report.realized_profit_eur()},
       {"estimated_hydrogen_kg", report.estimated_hydrogen_kg},
       {"realized_surplus_hydrogen_kg", report.realized_surplus_hydrogen_kg},
       {"realized_hydrogen_kg", report.realized_hydrogen_kg()},
       {"extra_compressor_mwh", report.extra_compressor_mwh},
       {"compressor_note",
        "energy to compress the surplus hydrogen; reported only, not deducted from the surplus "
        "profit"}};
}

void write_expost_csv(std::ostream& out, const ExPostReport& report) {
  out << "hour,estimated_kg,realized_kg,delta_kg\n";
  char buf[128];
  for (std::size_t t = 0; t < report.delta_kg.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", t, report.estimated_kg[t] + 0.0,
                  report.realized_kg[t] + 0.0, report.delta_kg[t] + 0.0);
    out << buf;
  }
}

}  // namespace h2dispatch
