#pragma once

// One solve of a model variant on a scenario window, variant comparisons and
// parameter sweeps, plus the files they write.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "h2dispatch/bounds.hpp"
#include "h2dispatch/expost.hpp"
#include "h2dispatch/milp.hpp"
#include "h2dispatch/models.hpp"
#include "h2dispatch/scenario.hpp"
#include "h2dispatch/segmentation.hpp"

namespace h2dispatch {

struct RunSpec {
  ModelKind model = ModelKind::kOnOffStandby;
  int segments = 12;
  int horizon_start = 0;
  int horizon_hours = 168;  // <= 0: to the end of the series
  double gap = 1e-4;
  long node_limit = 1000000;
  int threads = 1;
  /// Single-threaded search and no wall-clock fields in the report.
  bool deterministic = false;
};

/// Throws std::invalid_argument on a bad segment count, gap, window or limit.
void validate(const RunSpec& spec);
/// "OOS-12" style name.
std::string label(const RunSpec& spec);
/// Parses "oos-12" (case-insensitive) into model and segments over `base`.
RunSpec parse_label(const std::string& text, RunSpec base = {});

struct RunResult {
  RunSpec spec;
  PlantScenario scenario;  // the solved window
  SegmentSet segments;
  PriceRange price_range;
  int binaries = 0;
  int continuous = 0;
  int rows = 0;
  MilpSolution solution;
  bool has_schedule = false;
  DispatchSchedule schedule;
  ExPostReport expost;
};

/// Slices the window, builds and solves the model, decodes the incumbent and
/// evaluates it ex post. Infeasibility is reported through solution.status.
RunResult run_single(const RunSpec& spec, const PlantScenario& scenario);

/// Process exit code for a finished run: 0, 2 (infeasible) or 4 (limit reached).
int exit_code(const RunResult& run);

/// Report document; `timing` adds wall-clock fields.
nlohmann::json report_json(const RunResult& run, bool timing);
nlohmann::json bounds_json(const RunResult& run);
void write_schedule_csv(std::ostream& out, const RunResult& run);

/// schedule.csv, report.json, bounds.json, expost.csv and price_histogram.csv.
void write_run_outputs(const RunResult& run, const std::filesystem::path& dir);

struct CompareRow {
  std::string label;
  bool ok = false;
  std::string error;
  MilpStatus status = MilpStatus::kInfeasible;
  double estimated_profit_eur = 0.0;
  double realized_surplus_profit_eur = 0.0;
  double realized_profit_eur = 0.0;
  double estimated_hydrogen_kg = 0.0;
  double realized_surplus_hydrogen_kg = 0.0;
  double realized_hydrogen_kg = 0.0;
  /// Relative to the highest estimated profit among successful rows, in percent.
  double profit_vs_best_pct = 0.0;
  double realized_profit_vs_best_pct = 0.0;
  double gap = 0.0;
  long nodes = 0;
  double wall_time_s = 0.0;
};

struct Comparison {
  std::vector<CompareRow> rows;
  std::string best;  // label of the benchmark row
  bool complete() const;
};

/// Failing members are kept as rows with `error` set; the others still run.
Comparison run_compare(const std::vector<RunSpec>& specs, const PlantScenario& scenario);
nlohmann::json to_json(const Comparison& cmp, bool timing);
void write_compare_csv(std::ostream& out, const Comparison& cmp);

enum class SweepAxis : std::uint8_t { kWindRatio, kDemand, kHydrogenPrice };
const char* to_string(SweepAxis axis);
/// "wind_ratio", "demand", "hydrogen_price".
SweepAxis parse_sweep_axis(const std::string& text);

/// wind_ratio: wind capacity = value x C_e; demand: every minimum scaled by value;
/// hydrogen_price: EUR/kg.
PlantScenario apply_sweep(const PlantScenario& base, SweepAxis axis, double value);

/// Hours where the wind alone cannot run the electrolyzer at full load.
int wind_limited_hours(const PlantScenario& scn);

struct SweepPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  int wind_limited_hours = 0;
  PriceRange price_range;
  CompareRow coarse;  // OOS-1
  CompareRow fine;    // OOS-12
  /// (fine - coarse) / |fine|, percent.
  double realized_profit_diff_pct = 0.0;
  double realized_hydrogen_diff_pct = 0.0;
  double estimated_profit_diff_pct = 0.0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::kDemand;
  std::vector<SweepPoint> points;
};

/// OOS-1 against OOS-12 at each value; a failing point is recorded and the sweep continues.
SweepReport run_sweep(SweepAxis axis, const std::vector<double>& values,
                      const PlantScenario& base, const RunSpec& spec = {});
nlohmann::json to_json(const SweepReport& sweep, bool timing);
void write_sweep_csv(std::ostream& out, const SweepReport& sweep);

}  // namespace h2dispatch
