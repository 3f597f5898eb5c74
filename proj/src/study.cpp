#include "h2dispatch/study.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace h2dispatch {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.exceptions(std::ios::badbit | std::ios::failbit);
  return out;
}

nlohmann::json optional_number(bool present, double value) {
  return present ? nlohmann::json(value) : nlohmann::json(nullptr);
}

double relative_pct(double value, double reference) {
  return 100.0 * (value - reference) / std::max(1e-12, std::abs(reference));
}

CompareRow make_row(const RunResult& run) {
  CompareRow row;
  row.label = label(run.spec);
  row.status = run.solution.status;
  row.gap = run.solution.gap;
  row.nodes = run.solution.nodes;
  row.wall_time_s = run.solution.wall_time_s;
  row.ok = run.has_schedule;
  if (!run.has_schedule) {
    row.error = std::string("no feasible schedule (") + to_string(run.solution.status) + ")";
    return row;
  }
  row.estimated_profit_eur = run.expost.estimated_profit_eur;
  row.realized_surplus_profit_eur = run.expost.realized_surplus_profit_eur;
  row.realized_profit_eur = run.expost.realized_profit_eur();
  row.estimated_hydrogen_kg = run.expost.estimated_hydrogen_kg;
  row.realized_surplus_hydrogen_kg = run.expost.realized_surplus_hydrogen_kg;
  row.realized_hydrogen_kg = run.expost.realized_hydrogen_kg();
  return row;
}

CompareRow run_row(const RunSpec& spec, const PlantScenario& scenario) {
  try {
    return make_row(run_single(spec, scenario));
  } catch (const std::exception& e) {
    CompareRow row;
    row.label = label(spec);
    row.error = e.what();
    return row;
  }
}

nlohmann::json row_json(const CompareRow& row, bool timing) {
  nlohmann::json j = {{"label", row.label},
                      {"ok", row.ok},
                      {"status", to_string(row.status)},
                      {"estimated_profit_eur", optional_number(row.ok, row.estimated_profit_eur)},
                      {"realized_surplus_profit_eur",
                       optional_number(row.ok, row.realized_surplus_profit_eur)},
                      {"realized_profit_eur", optional_number(row.ok, row.realized_profit_eur)},
                      {"estimated_hydrogen_kg", optional_number(row.ok, row.estimated_hydrogen_kg)},
                      {"realized_surplus_hydrogen_kg",
                       optional_number(row.ok, row.realized_surplus_hydrogen_kg)},
                      {"realized_hydrogen_kg", optional_number(row.ok, row.realized_hydrogen_kg)},
                      {"profit_vs_best_pct", optional_number(row.ok, row.profit_vs_best_pct)},
                      {"realized_profit_vs_best_pct",
                       optional_number(row.ok, row.realized_profit_vs_best_pct)},
                      {"gap", row.gap},
                      {"nodes", row.nodes}};
  if (!row.error.empty()) j["error"] = row.error;
  if (timing) j["wall_time_s"] = row.wall_time_s;
  return j;
}

}  // namespace

void validate(const RunSpec& spec) {
  if (!is_supported_segment_count(spec.segments)) {
    throw std::invalid_argument("segments must be one of 1, 2, 4, 8, 12");
  }
  if (!(spec.gap > 0.0 && spec.gap < 1.0)) throw std::invalid_argument("gap must lie in (0, 1)");
  if (spec.horizon_start < 0) throw std::invalid_argument("horizon start must be >= 0");
  if (spec.node_limit < 1) throw std::invalid_argument("node limit must be >= 1");
  if (spec.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::string label(const RunSpec& spec) {
  std::string name = to_string(spec.model);
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
  return name + "-" + std::to_string(spec.segments);
}

RunSpec parse_label(const std::string& text, RunSpec base) {
  const auto dash = text.find('-');
  if (dash == std::string::npos) {
    throw std::invalid_argument("expected MODEL-SEGMENTS such as oos-12, got '" + text + "'");
  }
  base.model = parse_model_kind(text.substr(0, dash));
  try {
    std::size_t used = 0;
    base.segments = std::stoi(text.substr(dash + 1), &used);
    if (used != text.size() - dash - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad segment count in '" + text + "'");
  }
  validate(base);
  return base;
}

RunResult run_single(const RunSpec& spec, const PlantScenario& scenario) {
  validate(spec);
  const int length = spec.horizon_hours > 0 ? spec.horizon_hours
                                            : scenario.hours() - spec.horizon_start;
  RunResult run;
  run.spec = spec;
  run.scenario = slice_horizon(scenario, spec.horizon_start, length);
  const PlantScenario& scn = run.scenario;
  run.segments = make_segments(scn.physics, scn.minimum_load_mw, spec.segments);
  run.price_range = price_range(scn.physics, scn);

  const MilpInstance inst = build_model(spec.model, scn, run.segments);
  run.binaries = inst.num_binaries();
  run.continuous = inst.num_continuous();
  run.rows = inst.num_rows();

  MilpOptions opt;
  opt.gap = spec.gap;
  opt.node_limit = spec.node_limit;
  opt.threads = spec.deterministic ? 1 : spec.threads;
  run.solution = solve_milp(inst, opt);
  if (run.solution.has_incumbent()) {
    run.schedule = decode_solution(inst, spec.model, scn, run.segments, run.solution.values);
    run.expost = evaluate(run.schedule, scn.physics, scn);
    run.has_schedule = true;
  }
  return run;
}

int exit_code(const RunResult& run) {
  switch (run.solution.status) {
    case MilpStatus::kOptimal: return 0;
    case MilpStatus::kInfeasible:
    case MilpStatus::kUnbounded: return 2;
    case MilpStatus::kNodeLimit: return 4;
  }
  return 4;
}

nlohmann::json report_json(const RunResult& run, bool timing) {
  const PlantScenario& scn = run.scenario;
  const MilpSolution& sol = run.solution;
  nlohmann::json j;
  j["schema"] = "h2dispatch.report/1";
  j["run"] = {{"label", label(run.spec)},
              {"model", to_string(run.spec.model)},
              {"segments", run.spec.segments},
              {"horizon_start", run.spec.horizon_start},
              {"horizon_hours", scn.hours()},
              {"first_timestamp", scn.timestamps.empty() ? "" : scn.timestamps.front()},
              {"gap_limit", run.spec.gap},
              {"node_limit", run.spec.node_limit},
              {"threads", run.spec.deterministic ? 1 : run.spec.threads},
              {"deterministic", run.spec.deterministic}};
  j["instance"] = {{"binaries", run.binaries}, {"continuous", run.continuous}, {"rows", run.rows}};
  j["solver"] = {{"status", to_string(sol.status)},
                 {"objective", optional_number(sol.has_incumbent(), sol.objective)},
                 {"bound", sol.bound},
                 {"gap", optional_number(sol.has_incumbent(), sol.gap)},
                 {"nodes", sol.nodes},
                 {"lp_iterations", sol.lp_iterations}};
  if (timing) j["solver"]["wall_time_s"] = sol.wall_time_s;

  if (run.has_schedule) {
    const DispatchSchedule& s = run.schedule;
    j["estimated"] = {{"profit_eur", run.expost.estimated_profit_eur},
                      {"hydrogen_kg", run.expost.estimated_hydrogen_kg}};
    j["realized"] = run.expost;
    j["states"] = {{"on", s.count(ElectrolyzerState::kOn)},
                   {"standby", s.count(ElectrolyzerState::kStandby)},
                   {"off", s.count(ElectrolyzerState::kOff)},
                   {"startups", s.startups()}};
    j["final_storage_kg"] = s.hours.empty() ? 0.0 : s.hours.back().storage_kg;
  } else {
    j["estimated"] = nullptr;
    j["realized"] = nullptr;
    j["states"] = nullptr;
    j["final_storage_kg"] = nullptr;
  }
  j["segmentation"] = run.segments;
  j["price_range"] = run.price_range;
  return j;
}

nlohmann::json bounds_json(const RunResult& run) {
  const PriceHistogram hist = price_histogram(run.price_range, run.scenario.prices);
  nlohmann::json j = run.price_range;
  j["hydrogen_price_eur_kg"] = run.scenario.hydrogen_price_eur_kg;
  j["standby_load_mw"] = run.scenario.standby_load_mw;
  j["hours_below"] = hist.below;
  j["hours_inside"] = hist.inside;
  j["hours_above"] = hist.above;
  j["interval"] = "closed";
  return j;
}

void write_schedule_csv(std::ostream& out, const RunResult& run) {
  out << "hour,timestamp,price_eur_mwh,wind_mw,price_class,state,segment,consumption_mw,"
         "hydrogen_kg,realized_kg,delivered_kg,direct_kg,storage_kg,storage_in_kg,"
         "storage_out_kg,sold_mw,bought_mw,compressor_mw,startup\n";
  if (!run.has_schedule) return;
  const PlantScenario& scn = run.scenario;
  // Adding +0 turns a negative zero from the solver into +0.
  auto z = [](double v) { return v + 0.0; };
  char buf[640];
  for (int t = 0; t < scn.hours(); ++t) {
    const HourRecord& r = run.schedule.hours[t];
    const std::string stamp = t < static_cast<int>(scn.timestamps.size()) ? scn.timestamps[t] : "";
    std::snprintf(buf, sizeof buf,
                  "%d,%s,%.17g,%.17g,%s,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%d\n",
                  t, stamp.c_str(), z(scn.prices(t)), z(scn.wind(t)),
                  to_string(classify(run.price_range, scn.prices(t))), to_string(r.state),
                  r.segment, z(r.consumption_mw), z(r.hydrogen_kg), z(run.expost.realized_kg[t]),
                  z(r.delivered_kg), z(r.direct_kg), z(r.storage_kg), z(r.storage_in_kg),
                  z(r.storage_out_kg), z(r.sold_mw), z(r.bought_mw), z(r.compressor_mw), r.startup ? 1 : 0);
    out << buf;
  }
}

void write_run_outputs(const RunResult& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "schedule.csv");
    write_schedule_csv(out, run);
  }
  {
    auto out = open_output(dir / "report.json");
    out << report_json(run, !run.spec.deterministic).dump(2) << '\n';
  }
  {
    auto out = open_output(dir / "bounds.json");
    out << bounds_json(run).dump(2) << '\n';
  }
  {
    auto out = open_output(dir / "price_histogram.csv");
    write_histogram_csv(out, price_histogram(run.price_range, run.scenario.prices));
  }
  if (run.has_schedule) {
    auto out = open_output(dir / "expost.csv");
    write_expost_csv(out, run.expost);
  }
}

bool Comparison::complete() const {
  return std::all_of(rows.begin(), rows.end(), [](const CompareRow& r) { return r.ok; });
}

Comparison run_compare(const std::vector<RunSpec>& specs, const PlantScenario& scenario) {
  if (specs.size() < 2) throw std::invalid_argument("compare needs at least two variants");
  Comparison cmp;
  for (const RunSpec& spec : specs) cmp.rows.push_back(run_row(spec, scenario));

  const CompareRow* best = nullptr;
  for (const auto& row : cmp.rows) {
    if (row.ok && (!best || row.estimated_profit_eur > best->estimated_profit_eur)) best = &row;
  }
  if (best) {
    cmp.best = best->label;
    const double profit = best->estimated_profit_eur;
    const double realized = best->realized_profit_eur;
    for (auto& row : cmp.rows) {
      if (!row.ok) continue;
      row.profit_vs_best_pct = relative_pct(row.estimated_profit_eur, profit);
      row.realized_profit_vs_best_pct = relative_pct(row.realized_profit_eur, realized);
    }
  }
  return cmp;
}

nlohmann::json to_json(const Comparison& cmp, bool timing) {
  nlohmann::json j;
  j["benchmark"] = cmp.best;
  j["complete"] = cmp.complete();
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : cmp.rows) rows.push_back(row_json(row, timing));
  return j;
}

void write_compare_csv(std::ostream& out, const Comparison& cmp) {
  out << "label,status,estimated_profit_eur,realized_surplus_profit_eur,realized_profit_eur,"
         "estimated_hydrogen_kg,realized_surplus_hydrogen_kg,realized_hydrogen_kg,"
         "profit_vs_best_pct,realized_profit_vs_best_pct,error\n";
  char buf[512];
  for (const auto& r : cmp.rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,",
                  r.label.c_str(), to_string(r.status), r.estimated_profit_eur,
                  r.realized_surplus_profit_eur, r.realized_profit_eur, r.estimated_hydrogen_kg,
                  r.realized_surplus_hydrogen_kg, r.realized_hydrogen_kg, r.profit_vs_best_pct,
                  r.realized_profit_vs_best_pct);
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    out << buf << error << '\n';
  }
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWindRatio: return "wind_ratio";
    case SweepAxis::kDemand: return "demand";
    case SweepAxis::kHydrogenPrice: return "hydrogen_price";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  for (SweepAxis a : {SweepAxis::kWindRatio, SweepAxis::kDemand, SweepAxis::kHydrogenPrice}) {
    if (text == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + text +
                              "'; expected wind_ratio, demand or hydrogen_price");
}

PlantScenario apply_sweep(const PlantScenario& base, SweepAxis axis, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("sweep value must be finite");
  PlantScenario scn = base;
  switch (axis) {
    case SweepAxis::kWindRatio:
      if (!(value > 0.0)) throw std::invalid_argument("wind ratio must be > 0");
      set_wind_capacity(scn, value * scn.electrolyzer_capacity_mw);
      break;
    case SweepAxis::kDemand:
      if (value < 0.0) throw std::invalid_argument("demand multiplier must be >= 0");
      scn.daily_demand_kg *= value;
      for (auto& block : scn.demand) block.min_kg *= value;
      break;
    case SweepAxis::kHydrogenPrice:
      if (!(value > 0.0)) throw std::invalid_argument("hydrogen price must be > 0");
      scn.hydrogen_price_eur_kg = value;
      break;
  }
  validate(scn);
  return scn;
}

int wind_limited_hours(const PlantScenario& scn) {
  int n = 0;
  for (Eigen::Index t = 0; t < scn.wind.size(); ++t) {
    if (scn.wind(t) < scn.electrolyzer_capacity_mw) ++n;
  }
  return n;
}

SweepReport run_sweep(SweepAxis axis, const std::vector<double>& values,
                      const PlantScenario& base, const RunSpec& spec) {
  SweepReport rep;
  rep.axis = axis;
  RunSpec coarse = spec;
  coarse.model = ModelKind::kOnOffStandby;
  coarse.segments = 1;
  RunSpec fine = coarse;
  fine.segments = 12;
  for (double value : values) {
    SweepPoint pt;
    pt.value = value;
    try {
      const PlantScenario scn = apply_sweep(base, axis, value);
      const int length = spec.horizon_hours > 0 ? spec.horizon_hours : scn.hours() - spec.horizon_start;
      const PlantScenario window = slice_horizon(scn, spec.horizon_start, length);
      pt.wind_limited_hours = wind_limited_hours(window);
      pt.price_range = price_range(window.physics, window);
      pt.coarse = run_row(coarse, scn);
      pt.fine = run_row(fine, scn);
      pt.ok = pt.coarse.ok && pt.fine.ok;
      if (pt.ok) {
        pt.realized_profit_diff_pct =
            -relative_pct(pt.coarse.realized_profit_eur, pt.fine.realized_profit_eur);
        pt.realized_hydrogen_diff_pct =
            -relative_pct(pt.coarse.realized_hydrogen_kg, pt.fine.realized_hydrogen_kg);
        pt.estimated_profit_diff_pct =
            -relative_pct(pt.coarse.estimated_profit_eur, pt.fine.estimated_profit_eur);
      } else {
        pt.error = !pt.coarse.ok ? pt.coarse.label + ": " + pt.coarse.error
                                 : pt.fine.label + ": " + pt.fine.error;
      }
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

nlohmann::json to_json(const SweepReport& sweep, bool timing) {
  nlohmann::json j;
  j["axis"] = to_string(sweep.axis);
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : sweep.points) {
    nlohmann::json e = {{"value", p.value},
                        {"ok", p.ok},
                        {"wind_limited_hours", p.wind_limited_hours},
                        {"price_range", p.price_range},
                        {"coarse", row_json(p.coarse, timing)},
                        {"fine", row_json(p.fine, timing)},
                        {"realized_profit_diff_pct", optional_number(p.ok, p.realized_profit_diff_pct)},
                        {"realized_hydrogen_diff_pct",
                         optional_number(p.ok, p.realized_hydrogen_diff_pct)},
                        {"estimated_profit_diff_pct",
                         optional_number(p.ok, p.estimated_profit_diff_pct)}};
    if (!p.error.empty()) e["error"] = p.error;
    pts.push_back(std::move(e));
  }
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepReport& sweep) {
  out << "axis,value,ok,wind_limited_hours,price_lower_eur_mwh,price_upper_eur_mwh,"
         "coarse_realized_profit_eur,fine_realized_profit_eur,coarse_realized_hydrogen_kg,"
         "fine_realized_hydrogen_kg,realized_profit_diff_pct,realized_hydrogen_diff_pct,"
         "estimated_profit_diff_pct\n";
  char buf[512];
  for (const auto& p : sweep.points) {
    std::snprintf(buf, sizeof buf,
                  "%s,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(sweep.axis), p.value, p.ok ? 1 : 0, p.wind_limited_hours,
                  p.price_range.lower, p.price_range.upper, p.coarse.realized_profit_eur,
                  p.fine.realized_profit_eur, p.coarse.realized_hydrogen_kg,
                  p.fine.realized_hydrogen_kg, p.realized_profit_diff_pct,
                  p.realized_hydrogen_diff_pct, p.estimated_profit_diff_pct);
    out << buf;
  }
}

}  // namespace h2dispatch
