#include "h2dispatch/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "h2dispatch/errors.hpp"

namespace h2dispatch {
namespace {

constexpr int kHoursPerDay = 24;

const std::set<std::string> kPlantKeys = {
    "wind_farm_capacity_mw",  "electrolyzer_capacity_mw", "standby_load_mw",
    "minimum_load_mw",        "pressure_bar",             "temperature_c",
    "max_current_density_a_m2", "startup_cost_eur",       "tso_tariff_eur_mwh",
    "storage_capacity_kg",    "storage_max_output_kg_h",  "compressor_coefficient_mwh_kg",
    "hydrogen_price_eur_kg",  "minimum_daily_demand_kg",  "initial_storage_kg",
    "physics",                "demand_blocks"};

const std::set<std::string> kPhysicsKeys = {
    "u_rev_v", "k1_v_m2_a", "k2_v", "k3_m2_a", "faraday_f1_a2_m4", "faraday_f2",
    "log_base", "molar_mass_h2_kg_mol", "faraday_constant_c_mol"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double number_field(const nlohmann::json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw ParseError(source, 0, std::string("missing key '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ParseError(source, 0, std::string("key '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(source, 0, std::string("key '") + key + "' is not finite");
  return x;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ElectrolyzerPhysics reference_physics(double capacity_mw) {
  ElectrolyzerPhysics phys;
  phys.u_rev = 1.1752222640544785;
  phys.k1 = 5.5419436599999995e-05;
  phys.k2 = 0.33824;
  phys.k3 = 0.008734034567901235;
  phys.faraday_f1 = 212862.24;
  phys.faraday_f2 = 0.9460000000000001;
  phys.i_max = 5000.0;
  phys.temperature = 90.0;
  phys.pressure = 30.0;
  phys.log_base = LogBase::kTen;
  return calibrate_area(phys, capacity_mw);
}

PlantScenario reference_plant() {
  PlantScenario scn;
  scn.physics = reference_physics(scn.electrolyzer_capacity_mw);
  return scn;
}

void validate(const PlantScenario& scn) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid scenario: " + what);
  };
  require(scn.wind_capacity_mw > 0.0, "wind capacity must be positive");
  require(scn.standby_load_mw > 0.0 && scn.standby_load_mw < scn.minimum_load_mw &&
              scn.minimum_load_mw < scn.electrolyzer_capacity_mw,
          "need 0 < standby load < minimum load < electrolyzer capacity");
  require(scn.startup_cost_eur >= 0.0, "start-up cost must be non-negative");
  require(scn.storage_capacity_kg >= 0.0 && scn.storage_max_output_kg_h >= 0.0,
          "storage limits must be non-negative");
  require(scn.compressor_mwh_kg >= 0.0, "compressor coefficient must be non-negative");
  require(scn.initial_storage_kg >= 0.0 && scn.initial_storage_kg <= scn.storage_capacity_kg,
          "initial storage must lie in [0, storage capacity]");
  require(scn.daily_demand_kg >= 0.0, "daily demand must be non-negative");
  require(std::isfinite(scn.hydrogen_price_eur_kg) && std::isfinite(scn.tso_tariff_eur_mwh),
          "prices must be finite");
  validate(scn.physics);
  require(std::abs(max_power(scn.physics) - scn.electrolyzer_capacity_mw) <=
              1e-9 * scn.electrolyzer_capacity_mw,
          "physics not calibrated to the electrolyzer capacity");

  const int n = scn.hours();
  require(scn.capacity_factor.size() == n && scn.wind.size() == n, "series lengths differ");
  require(scn.timestamps.empty() || static_cast<int>(scn.timestamps.size()) == n,
          "timestamp count differs from series length");
  for (int t = 0; t < n; ++t) {
    require(std::isfinite(scn.prices(t)), "price at hour " + std::to_string(t) + " is not finite");
    require(scn.capacity_factor(t) >= 0.0 && scn.capacity_factor(t) <= 1.0,
            "capacity factor at hour " + std::to_string(t) + " outside [0, 1]");
    require(scn.wind(t) >= 0.0 && scn.wind(t) <= scn.wind_capacity_mw * (1.0 + 1e-12),
            "wind at hour " + std::to_string(t) + " outside [0, C_w]");
  }
  std::vector<int> seen(n, 0);
  for (const auto& block : scn.demand) {
    require(block.min_kg >= 0.0 && std::isfinite(block.min_kg), "demand minimum must be non-negative");
    for (int t : block.hours) {
      require(t >= 0 && t < n, "demand block hour " + std::to_string(t) + " outside the horizon");
      require(++seen[t] == 1, "demand blocks overlap at hour " + std::to_string(t));
    }
  }
}

std::vector<DemandBlock> daily_demand_blocks(int hours, double daily_min_kg) {
  std::vector<DemandBlock> blocks;
  for (int start = 0; start < hours; start += kHoursPerDay) {
    DemandBlock b;
    const int len = std::min(kHoursPerDay, hours - start);
    for (int t = start; t < start + len; ++t) b.hours.push_back(t);
    b.min_kg = daily_min_kg * len / kHoursPerDay;
    blocks.push_back(std::move(b));
  }
  return blocks;
}

void set_series(PlantScenario& scn, std::vector<std::string> timestamps, Eigen::VectorXd prices,
                Eigen::VectorXd capacity_factor) {
  if (prices.size() != capacity_factor.size()) {
    throw std::invalid_argument("price and capacity-factor series differ in length");
  }
  scn.timestamps = std::move(timestamps);
  scn.prices = std::move(prices);
  scn.capacity_factor = std::move(capacity_factor);
  scn.wind = scn.capacity_factor * scn.wind_capacity_mw;
  scn.demand = daily_demand_blocks(scn.hours(), scn.daily_demand_kg);
}

void set_wind_capacity(PlantScenario& scn, double wind_capacity_mw) {
  scn.wind_capacity_mw = wind_capacity_mw;
  scn.wind = scn.capacity_factor * wind_capacity_mw;
}

PlantScenario plant_from_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object()) throw ParseError(source, 0, "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kPlantKeys.count(key)) throw ParseError(source, 0, "unknown key '" + key + "'");
  }
  PlantScenario scn;
  scn.wind_capacity_mw = number_field(j, "wind_farm_capacity_mw", source);
  scn.electrolyzer_capacity_mw = number_field(j, "electrolyzer_capacity_mw", source);
  scn.standby_load_mw = number_field(j, "standby_load_mw", source);
  scn.minimum_load_mw = number_field(j, "minimum_load_mw", source);
  scn.startup_cost_eur = number_field(j, "startup_cost_eur", source);
  scn.tso_tariff_eur_mwh = number_field(j, "tso_tariff_eur_mwh", source);
  scn.storage_capacity_kg = number_field(j, "storage_capacity_kg", source);
  scn.storage_max_output_kg_h = number_field(j, "storage_max_output_kg_h", source);
  scn.compressor_mwh_kg = number_field(j, "compressor_coefficient_mwh_kg", source);
  scn.hydrogen_price_eur_kg = number_field(j, "hydrogen_price_eur_kg", source);
  scn.daily_demand_kg = number_field(j, "minimum_daily_demand_kg", source);
  scn.initial_storage_kg = j.contains("initial_storage_kg") ? number_field(j, "initial_storage_kg", source) : 0.0;

  ElectrolyzerPhysics phys = reference_physics();
  phys.temperature = number_field(j, "temperature_c", source);
  phys.pressure = number_field(j, "pressure_bar", source);
  phys.i_max = number_field(j, "max_current_density_a_m2", source);
  if (j.contains("physics")) {
    const auto& p = j.at("physics");
    const std::string psrc = source + " [physics]";
    if (!p.is_object()) throw ParseError(source, 0, "'physics' must be an object");
    for (const auto& [key, value] : p.items()) {
      if (!kPhysicsKeys.count(key)) throw ParseError(psrc, 0, "unknown key '" + key + "'");
    }
    phys.u_rev = number_field(p, "u_rev_v", psrc);
    phys.k1 = number_field(p, "k1_v_m2_a", psrc);
    phys.k2 = number_field(p, "k2_v", psrc);
    phys.k3 = number_field(p, "k3_m2_a", psrc);
    phys.faraday_f1 = number_field(p, "faraday_f1_a2_m4", psrc);
    phys.faraday_f2 = number_field(p, "faraday_f2", psrc);
    if (p.contains("molar_mass_h2_kg_mol")) phys.m_h2 = number_field(p, "molar_mass_h2_kg_mol", psrc);
    if (p.contains("faraday_constant_c_mol")) phys.f_const = number_field(p, "faraday_constant_c_mol", psrc);
    if (p.contains("log_base")) {
      const auto base = p.at("log_base").is_string() ? p.at("log_base").get<std::string>() : "";
      if (base == "10") {
        phys.log_base = LogBase::kTen;
      } else if (base == "e") {
        phys.log_base = LogBase::kNatural;
      } else {
        throw ParseError(psrc, 0, "log_base must be \"10\" or \"e\"");
      }
    }
  }
  try {
    scn.physics = calibrate_area(phys, scn.electrolyzer_capacity_mw);
  } catch (const std::exception& e) {
    throw ParseError(source, 0, std::string("physics: ") + e.what());
  }

  if (j.contains("demand_blocks")) {
    const auto& arr = j.at("demand_blocks");
    if (!arr.is_array()) throw ParseError(source, 0, "'demand_blocks' must be an array");
    for (const auto& b : arr) {
      if (!b.is_object() || !b.contains("hours") || !b.contains("min_kg") || b.size() != 2) {
        throw ParseError(source, 0, "demand block needs exactly 'hours' and 'min_kg'");
      }
      DemandBlock block;
      block.hours = b.at("hours").get<std::vector<int>>();
      block.min_kg = number_field(b, "min_kg", source);
      scn.demand.push_back(std::move(block));
    }
  }
  return scn;
}

nlohmann::json plant_to_json(const PlantScenario& scn) {
  nlohmann::json j;
  j["wind_farm_capacity_mw"] = scn.wind_capacity_mw;
  j["electrolyzer_capacity_mw"] = scn.electrolyzer_capacity_mw;
  j["standby_load_mw"] = scn.standby_load_mw;
  j["minimum_load_mw"] = scn.minimum_load_mw;
  j["pressure_bar"] = scn.physics.pressure;
  j["temperature_c"] = scn.physics.temperature;
  j["max_current_density_a_m2"] = scn.physics.i_max;
  j["startup_cost_eur"] = scn.startup_cost_eur;
  j["tso_tariff_eur_mwh"] = scn.tso_tariff_eur_mwh;
  j["storage_capacity_kg"] = scn.storage_capacity_kg;
  j["storage_max_output_kg_h"] = scn.storage_max_output_kg_h;
  j["compressor_coefficient_mwh_kg"] = scn.compressor_mwh_kg;
  j["hydrogen_price_eur_kg"] = scn.hydrogen_price_eur_kg;
  j["minimum_daily_demand_kg"] = scn.daily_demand_kg;
  j["initial_storage_kg"] = scn.initial_storage_kg;
  j["physics"] = {{"u_rev_v", scn.physics.u_rev},
                  {"k1_v_m2_a", scn.physics.k1},
                  {"k2_v", scn.physics.k2},
                  {"k3_m2_a", scn.physics.k3},
                  {"faraday_f1_a2_m4", scn.physics.faraday_f1},
                  {"faraday_f2", scn.physics.faraday_f2},
                  {"log_base", scn.physics.log_base == LogBase::kTen ? "10" : "e"},
                  {"molar_mass_h2_kg_mol", scn.physics.m_h2},
                  {"faraday_constant_c_mol", scn.physics.f_const}};
  return j;
}

long long parse_timestamp(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int consumed = 0;
  const std::string t = trim(text);
  if (std::sscanf(t.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &consumed) != 6 ||
      (sep != 'T' && sep != ' ')) {
    throw std::invalid_argument("bad timestamp '" + text + "'");
  }
  std::string rest = t.substr(consumed);
  if (!rest.empty() && rest[0] == ':') {
    int used = 0;
    if (std::sscanf(rest.c_str(), ":%2d%n", &s, &used) != 1) throw std::invalid_argument("bad timestamp '" + text + "'");
    rest = rest.substr(used);
  }
  if (!(rest.empty() || rest == "Z" || rest == "+00:00")) {
    throw std::invalid_argument("timestamp '" + text + "' is not UTC");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw std::invalid_argument("bad timestamp '" + text + "'");
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<long long>(days) * 86400 + h * 3600 + mi * 60 + s;
}

HourlySeries parse_series_csv(std::istream& in, const std::string& value_header,
                              const std::string& source) {
  std::string line;
  int lineno = 0;
  bool header = false;
  HourlySeries out;
  std::vector<double> values;
  long long prev = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw ParseError(source, lineno, "expected two comma-separated columns");
    }
    const std::string first = trim(row.substr(0, comma));
    const std::string second = trim(row.substr(comma + 1));
    if (!header) {
      if (first != "timestamp" || second != value_header) {
        throw ParseError(source, lineno, "expected header 'timestamp," + value_header + "'");
      }
      header = true;
      continue;
    }
    long long stamp = 0;
    try {
      stamp = parse_timestamp(first);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!values.empty() && stamp != prev + 3600) {
      throw ParseError(source, lineno, "timestamp '" + first + "' does not follow the previous row by one hour");
    }
    prev = stamp;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != second.size() || !std::isfinite(v)) {
      throw ParseError(source, lineno, "bad number '" + second + "'");
    }
    if (value_header == "capacity_factor" && (v < 0.0 || v > 1.0)) {
      throw ParseError(source, lineno, "capacity factor " + second + " outside [0, 1]");
    }
    out.timestamps.push_back(first);
    values.push_back(v);
  }
  if (!header) throw ParseError(source, lineno, "empty file");
  if (values.empty()) throw ParseError(source, lineno, "no data rows");
  out.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return out;
}

HourlySeries read_series_csv(const std::filesystem::path& path, const std::string& value_header) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_series_csv(in, value_header, path.string());
}

void write_series_csv(std::ostream& out, const std::string& value_header,
                      const std::vector<std::string>& timestamps, const Eigen::VectorXd& values) {
  out << "timestamp," << value_header << '\n';
  for (Eigen::Index t = 0; t < values.size(); ++t) {
    out << timestamps.at(t) << ',' << format_double(values(t)) << '\n';
  }
}

PlantScenario load_series(PlantScenario plant, const std::filesystem::path& prices,
                          const std::filesystem::path& wind, const std::string& source) {
  std::vector<DemandBlock> explicit_demand = std::move(plant.demand);

  HourlySeries price = read_series_csv(prices, "price_eur_mwh");
  HourlySeries cf = read_series_csv(wind, "capacity_factor");
  if (price.values.size() != cf.values.size()) {
    throw ParseError(wind.string(), 0,
                     "series length " + std::to_string(cf.values.size()) + " differs from price series length " +
                         std::to_string(price.values.size()));
  }
  for (std::size_t t = 0; t < price.timestamps.size(); ++t) {
    if (parse_timestamp(price.timestamps[t]) != parse_timestamp(cf.timestamps[t])) {
      throw ParseError(wind.string(), static_cast<int>(t) + 2, "timestamp differs from the price series");
    }
  }
  set_series(plant, std::move(price.timestamps), std::move(price.values), std::move(cf.values));
  if (!explicit_demand.empty()) plant.demand = std::move(explicit_demand);
  try {
    validate(plant);
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
  return plant;
}

PlantScenario load_scenario(const std::filesystem::path& config, const std::filesystem::path& prices,
                            const std::filesystem::path& wind) {
  std::ifstream in(config);
  if (!in) throw ParseError(config.string(), 0, "cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(config.string(), 0, e.what());
  }
  return load_series(plant_from_json(j, config.string()), prices, wind, config.string());
}

void save_scenario(const PlantScenario& scn, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = plant_to_json(scn);
  auto& blocks = j["demand_blocks"] = nlohmann::json::array();
  for (const auto& b : scn.demand) blocks.push_back({{"hours", b.hours}, {"min_kg", b.min_kg}});
  std::ofstream(dir / "config.json") << j.dump(2) << '\n';
  std::vector<std::string> stamps = scn.timestamps;
  if (stamps.empty()) {
    for (int t = 0; t < scn.hours(); ++t) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "2019-01-%02dT%02d:00:00Z", 1 + t / 24, t % 24);
      stamps.emplace_back(buf);
    }
  }
  std::ofstream prices(dir / "prices.csv");
  write_series_csv(prices, "price_eur_mwh", stamps, scn.prices);
  std::ofstream wind(dir / "wind.csv");
  write_series_csv(wind, "capacity_factor", stamps, scn.capacity_factor);
}

PlantScenario slice_horizon(const PlantScenario& scn, int start, int length) {
  if (length <= 0) throw std::out_of_range("horizon length must be positive");
  if (start < 0 || start + length > scn.hours()) {
    throw std::out_of_range("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                            ") outside the " + std::to_string(scn.hours()) + "-hour series");
  }
  PlantScenario out = scn;
  out.prices = scn.prices.segment(start, length);
  out.capacity_factor = scn.capacity_factor.segment(start, length);
  out.wind = scn.wind.segment(start, length);
  if (!scn.timestamps.empty()) {
    out.timestamps.assign(scn.timestamps.begin() + start, scn.timestamps.begin() + start + length);
  }
  out.demand.clear();
  for (const auto& b : scn.demand) {
    DemandBlock clipped;
    for (int t : b.hours) {
      if (t >= start && t < start + length) clipped.hours.push_back(t - start);
    }
    if (clipped.hours.empty()) continue;
    clipped.min_kg = b.hours.size() == clipped.hours.size()
                         ? b.min_kg
                         : b.min_kg * static_cast<double>(clipped.hours.size()) / b.hours.size();
    out.demand.push_back(std::move(clipped));
  }
  return out;
}

}  // namespace h2dispatch
