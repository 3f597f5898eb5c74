// Command-line driver: solve one model variant, compare variants, sweep a
// scenario parameter, and inspect price bounds, segments and LP exports.
//
// Exit codes: 0 success, 2 infeasible, 3 input error, 4 solver limit reached.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "h2dispatch/bounds.hpp"
#include "h2dispatch/errors.hpp"
#include "h2dispatch/models.hpp"
#include "h2dispatch/scenario.hpp"
#include "h2dispatch/study.hpp"

namespace fs = std::filesystem;
using namespace h2dispatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInput = 3;
constexpr int kExitLimit = 4;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::string config;
  std::string prices;
  std::string wind;
  std::string out = "out";
  std::string model = "oos";
  int segments = 12;
  RunSpec spec;
};

void add_scenario_flags(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--config", in.config, "plant parameters JSON (default: reference plant)");
  cmd->add_option("--prices", in.prices, "CSV timestamp,price_eur_mwh")->required();
  cmd->add_option("--wind", in.wind, "CSV timestamp,capacity_factor")->required();
  cmd->add_option("--horizon-start", in.spec.horizon_start, "first hour of the window")
      ->capture_default_str();
  cmd->add_option("--horizon-hours", in.spec.horizon_hours,
                  "window length; 0 runs to the end of the series")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--gap", in.spec.gap, "relative optimality gap")->capture_default_str();
  cmd->add_option("--node-limit", in.spec.node_limit, "branch-and-bound node limit")
      ->capture_default_str();
  cmd->add_option("--threads", in.spec.threads, "parallel node solves")->capture_default_str();
  cmd->add_flag("--deterministic", in.spec.deterministic,
                "single-threaded search; reports omit wall-clock fields");
  cmd->add_option("--out", in.out, "output directory")->capture_default_str();
}

void add_model_flags(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--model", in.model, "oos, oo or os")->capture_default_str();
  cmd->add_option("--segments", in.segments, "1, 2, 4, 8 or 12")->capture_default_str();
}

PlantScenario load(const Inputs& in) {
  if (in.config.empty()) return load_series(reference_plant(), in.prices, in.wind, "reference plant");
  return load_scenario(in.config, in.prices, in.wind);
}

RunSpec model_spec(const Inputs& in) {
  RunSpec spec = in.spec;
  try {
    spec.model = parse_model_kind(in.model);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  spec.segments = in.segments;
  return spec;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int worst_code(int a, int b) {
  auto rank = [](int c) { return c == kExitOk ? 0 : c == kExitLimit ? 1 : c == kExitInfeasible ? 2 : 3; };
  return rank(a) >= rank(b) ? a : b;
}

int status_code(MilpStatus status) {
  switch (status) {
    case MilpStatus::kOptimal: return kExitOk;
    case MilpStatus::kNodeLimit: return kExitLimit;
    default: return kExitInfeasible;
  }
}

int cmd_solve(const Inputs& in) {
  const PlantScenario scn = load(in);
  const RunSpec spec = model_spec(in);
  const RunResult run = run_single(spec, scn);
  write_run_outputs(run, in.out);
  const int code = exit_code(run);
  std::printf("%s: %s", label(spec).c_str(), to_string(run.solution.status));
  if (run.has_schedule) {
    std::printf(", estimated profit %.2f EUR, realized surplus %.2f EUR (%.2f kg), gap %.2e, %ld nodes",
                run.expost.estimated_profit_eur, run.expost.realized_surplus_profit_eur,
                run.expost.realized_surplus_hydrogen_kg, run.solution.gap, run.solution.nodes);
  }
  std::printf("\n");
  if (code == kExitInfeasible) std::fprintf(stderr, "error: no feasible dispatch for this window\n");
  if (code == kExitLimit) std::fprintf(stderr, "warning: node limit reached before the gap closed\n");
  return code;
}

std::vector<RunSpec> parse_variants(const std::string& list, const RunSpec& base) {
  std::vector<RunSpec> specs;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      specs.push_back(parse_label(item, base));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (specs.size() < 2) throw InputError("compare needs at least two variants");
  return specs;
}

int cmd_compare(const Inputs& in, const std::string& variants) {
  const std::vector<RunSpec> specs = parse_variants(variants, in.spec);
  const PlantScenario scn = load(in);
  const Comparison cmp = run_compare(specs, scn);
  const fs::path dir = in.out;
  write_text(dir / "compare.json", to_json(cmp, !in.spec.deterministic).dump(2) + "\n");
  std::ostringstream csv;
  write_compare_csv(csv, cmp);
  write_text(dir / "compare.csv", csv.str());

  std::printf("%-8s %-11s %16s %16s %14s %10s\n", "variant", "status", "est. profit EUR",
              "surplus EUR", "surplus kg", "vs best %");
  int code = kExitOk;
  for (const auto& r : cmp.rows) {
    if (r.ok) {
      std::printf("%-8s %-11s %16.2f %16.2f %14.2f %10.3f\n", r.label.c_str(), to_string(r.status),
                  r.estimated_profit_eur, r.realized_surplus_profit_eur,
                  r.realized_surplus_hydrogen_kg, r.profit_vs_best_pct);
      code = worst_code(code, status_code(r.status));
    } else {
      std::printf("%-8s failed: %s\n", r.label.c_str(), r.error.c_str());
      code = worst_code(code, r.status == MilpStatus::kNodeLimit ? kExitLimit : kExitInfeasible);
    }
  }
  if (!cmp.best.empty()) std::printf("benchmark: %s\n", cmp.best.c_str());
  return code;
}

int cmd_sweep(const Inputs& in, const std::string& axis_text, const std::vector<double>& values) {
  SweepAxis axis;
  try {
    axis = parse_sweep_axis(axis_text);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const PlantScenario scn = load(in);
  const SweepReport rep = run_sweep(axis, values, scn, in.spec);
  const fs::path dir = in.out;
  write_text(dir / "sweep.json", to_json(rep, !in.spec.deterministic).dump(2) + "\n");
  std::ostringstream csv;
  write_sweep_csv(csv, rep);
  write_text(dir / "sweep.csv", csv.str());

  int code = kExitOk;
  std::printf("%-14s %10s %12s %12s %14s %14s\n", to_string(axis), "limited h", "lb EUR/MWh",
              "ub EUR/MWh", "d profit %", "d hydrogen %");
  for (const auto& p : rep.points) {
    if (p.ok) {
      std::printf("%-14g %10d %12.3f %12.3f %14.3f %14.3f\n", p.value, p.wind_limited_hours,
                  p.price_range.lower, p.price_range.upper, p.realized_profit_diff_pct,
                  p.realized_hydrogen_diff_pct);
      code = worst_code(code, worst_code(status_code(p.coarse.status), status_code(p.fine.status)));
    } else {
      std::printf("%-14g failed: %s\n", p.value, p.error.c_str());
      code = worst_code(code, kExitInfeasible);
    }
  }
  return code;
}

int cmd_bounds(const Inputs& in, double bin_width) {
  const PlantScenario full = load(in);
  const int length = in.spec.horizon_hours > 0 ? in.spec.horizon_hours
                                               : full.hours() - in.spec.horizon_start;
  const PlantScenario scn = slice_horizon(full, in.spec.horizon_start, length);
  const PriceRange range = price_range(scn.physics, scn);
  const PriceHistogram hist = price_histogram(range, scn.prices, bin_width);
  nlohmann::json j = range;
  j["hours_below"] = hist.below;
  j["hours_inside"] = hist.inside;
  j["hours_above"] = hist.above;
  j["interval"] = "closed";
  const fs::path dir = in.out;
  write_text(dir / "bounds.json", j.dump(2) + "\n");
  std::ostringstream csv;
  write_histogram_csv(csv, hist);
  write_text(dir / "price_histogram.csv", csv.str());
  std::printf("price range [%.4f, %.4f] EUR/MWh; hours below %d, inside %d, above %d\n",
              range.lower, range.upper, hist.below, hist.inside, hist.above);
  return kExitOk;
}

int cmd_segments(const std::string& config, int segments) {
  PlantScenario scn = reference_plant();
  if (!config.empty()) {
    std::ifstream f(config);
    if (!f) throw InputError("cannot open " + config);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(config, 0, e.what());
    }
    scn = plant_from_json(j, config);
  }
  if (!is_supported_segment_count(segments)) throw InputError("segments must be one of 1, 2, 4, 8, 12");
  const SegmentSet seg = make_segments(scn.physics, scn.minimum_load_mw, segments);
  nlohmann::json j = seg;
  j["max_gap_kg_h"] = max_approximation_gap(scn.physics, seg);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_export_lp(const Inputs& in, const std::string& path) {
  const PlantScenario full = load(in);
  const RunSpec spec = model_spec(in);
  validate(spec);
  const int length = spec.horizon_hours > 0 ? spec.horizon_hours : full.hours() - spec.horizon_start;
  const PlantScenario scn = slice_horizon(full, spec.horizon_start, length);
  const SegmentSet seg = make_segments(scn.physics, scn.minimum_load_mw, spec.segments);
  const MilpInstance inst = build_model(spec.model, scn, seg);
  std::ostringstream text;
  write_lp(text, inst, label(spec));
  write_text(path, text.str());
  std::printf("%s: %d variables (%d binary), %d rows -> %s\n", label(spec).c_str(),
              inst.num_variables(), inst.num_binaries(), inst.num_rows(), path.c_str());
  return kExitOk;
}

int cmd_verify(const Inputs& in, const std::string& solution_path) {
  const PlantScenario full = load(in);
  const RunSpec spec = model_spec(in);
  validate(spec);
  const int length = spec.horizon_hours > 0 ? spec.horizon_hours : full.hours() - spec.horizon_start;
  const PlantScenario scn = slice_horizon(full, spec.horizon_start, length);
  const SegmentSet seg = make_segments(scn.physics, scn.minimum_load_mw, spec.segments);
  const MilpInstance inst = build_model(spec.model, scn, seg);
  std::ifstream f(solution_path);
  if (!f) throw InputError("cannot open " + solution_path);
  const Eigen::VectorXd x = read_solution(f, inst, solution_path);
  const MilpSolution sol = verify_external_solution(inst, x);
  const DispatchSchedule schedule = decode_solution(inst, spec.model, scn, seg, x);
  const ExPostReport expost = evaluate(schedule, scn.physics, scn);
  std::printf("%s: feasible, objective %.6f EUR, realized surplus %.6f EUR\n", label(spec).c_str(),
              sol.objective, expost.realized_surplus_profit_eur);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead dispatch of a wind-electrolyzer plant"};
  app.require_subcommand(1);
  Inputs in;

  auto* solve = app.add_subcommand("solve", "solve one model variant and write reports");
  add_scenario_flags(solve, in);
  add_model_flags(solve, in);
  add_solver_flags(solve, in);

  std::string variants = "oos-12,oos-1,oo-12,oo-1,os-12,os-1";
  auto* compare = app.add_subcommand("compare", "solve several variants and tabulate profits");
  add_scenario_flags(compare, in);
  add_solver_flags(compare, in);
  compare->add_option("--variants", variants, "comma-separated MODEL-SEGMENTS list")
      ->capture_default_str();

  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "OOS-1 against OOS-12 across a parameter");
  add_scenario_flags(sweep, in);
  add_solver_flags(sweep, in);
  sweep->add_option("--axis", axis, "wind_ratio, demand or hydrogen_price")->required();
  sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');

  double bin_width = 5.0;
  auto* bounds = app.add_subcommand("bounds", "price range where segmentation matters");
  add_scenario_flags(bounds, in);
  bounds->add_option("--out", in.out, "output directory")->capture_default_str();
  bounds->add_option("--bin-width", bin_width, "histogram bin width EUR/MWh")->capture_default_str();

  std::string seg_config;
  int seg_count = 12;
  auto* segments = app.add_subcommand("segments", "print the piecewise production curve");
  segments->add_option("--config", seg_config, "plant parameters JSON");
  segments->add_option("--segments", seg_count, "1, 2, 4, 8 or 12")->capture_default_str();

  std::string lp_path = "model.lp";
  auto* export_lp = app.add_subcommand("export-lp", "write the MILP in LP format");
  add_scenario_flags(export_lp, in);
  add_model_flags(export_lp, in);
  export_lp->add_option("--lp", lp_path, "output file")->capture_default_str();

  std::string solution_path;
  auto* verify = app.add_subcommand("verify-solution", "check an external solution file");
  add_scenario_flags(verify, in);
  add_model_flags(verify, in);
  verify->add_option("--solution", solution_path, "name = value lines")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*solve) return cmd_solve(in);
    if (*compare) return cmd_compare(in, variants);
    if (*sweep) return cmd_sweep(in, axis, values);
    if (*bounds) return cmd_bounds(in, bin_width);
    if (*segments) return cmd_segments(seg_config, seg_count);
    if (*export_lp) return cmd_export_lp(in, lp_path);
    if (*verify) return cmd_verify(in, solution_path);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const IntegrityError& e) {
    std::fprintf(stderr, "integrity error (%s): %s\n", e.constraint().c_str(), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
