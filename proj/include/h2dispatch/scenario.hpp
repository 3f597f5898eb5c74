#pragma once

// Plant parameters, hourly price and wind series, and the demand schedule.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "h2dispatch/physics.hpp"

namespace h2dispatch {

/// Minimum hydrogen delivered over a subset of hours.
struct DemandBlock {
  std::vector<int> hours;
  double min_kg = 0.0;
};

struct PlantScenario {
  double wind_capacity_mw = 104.5;
  double electrolyzer_capacity_mw = 52.25;
  double standby_load_mw = 0.52;
  double minimum_load_mw = 7.84;
  double startup_cost_eur = 2612.5;
  double tso_tariff_eur_mwh = 15.06;
  double hydrogen_price_eur_kg = 2.1;
  double storage_capacity_kg = 22000.0;
  double storage_max_output_kg_h = 912.13;
  double compressor_mwh_kg = 0.0012;
  double initial_storage_kg = 0.0;
  double daily_demand_kg = 3667.0;

  /// Cell area calibrated so that max_power(physics) == electrolyzer_capacity_mw.
  ElectrolyzerPhysics physics;

  std::vector<std::string> timestamps;  // informative only
  Eigen::VectorXd prices;               // EUR/MWh
  Eigen::VectorXd capacity_factor;      // [0, 1]
  Eigen::VectorXd wind;                 // MW, capacity_factor * wind_capacity_mw
  std::vector<DemandBlock> demand;

  int hours() const { return static_cast<int>(prices.size()); }
  /// Price paid for grid purchases: day-ahead price plus the TSO tariff.
  double import_price(int t) const { return prices(t) + tso_tariff_eur_mwh; }
};

/// Default polarization/Faraday coefficients at 90 degC, 30 bar, area calibrated to `capacity_mw`.
ElectrolyzerPhysics reference_physics(double capacity_mw = 52.25);

/// Reference plant parameters with reference physics and no time series.
PlantScenario reference_plant();

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const PlantScenario& scn);

/// Consecutive 24-hour blocks from hour 0; a trailing partial day gets a pro-rata minimum.
std::vector<DemandBlock> daily_demand_blocks(int hours, double daily_min_kg);

/// Sets capacity_factor, wind, timestamps and default demand blocks.
void set_series(PlantScenario& scn, std::vector<std::string> timestamps, Eigen::VectorXd prices,
                Eigen::VectorXd capacity_factor);
/// Changes the wind farm size and rescales the wind series.
void set_wind_capacity(PlantScenario& scn, double wind_capacity_mw);

// JSON config (parameter keys only, no series). Unknown keys are rejected.
PlantScenario plant_from_json(const nlohmann::json& j, const std::string& source = "config");
nlohmann::json plant_to_json(const PlantScenario& scn);

struct HourlySeries {
  std::vector<std::string> timestamps;
  Eigen::VectorXd values;
};

/// Reads a two-column CSV with the given value header; checks hourly timestamps.
HourlySeries read_series_csv(const std::filesystem::path& path, const std::string& value_header);
HourlySeries parse_series_csv(std::istream& in, const std::string& value_header,
                              const std::string& source);
void write_series_csv(std::ostream& out, const std::string& value_header,
                      const std::vector<std::string>& timestamps, const Eigen::VectorXd& values);

/// Attaches price and wind series to `plant`; explicit demand blocks on `plant` are kept.
PlantScenario load_series(PlantScenario plant, const std::filesystem::path& prices,
                          const std::filesystem::path& wind, const std::string& source = "config");
PlantScenario load_scenario(const std::filesystem::path& config, const std::filesystem::path& prices,
                            const std::filesystem::path& wind);
/// Writes config.json, prices.csv and wind.csv into `dir`; demand blocks are stored explicitly.
void save_scenario(const PlantScenario& scn, const std::filesystem::path& dir);

/// Hours [start, start + length). Demand blocks are clipped with pro-rata minimums.
PlantScenario slice_horizon(const PlantScenario& scn, int start, int length);

/// UTC seconds since the epoch for "YYYY-MM-DD[T ]HH:MM[:SS][Z|+00:00]".
long long parse_timestamp(const std::string& text);

}  // namespace h2dispatch
