#include "h2dispatch/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "h2dispatch/errors.hpp"

namespace h2dispatch {
namespace {

std::string var_name(const std::string& q, int t, int s = -1) {
  std::string n = q + "_t" + std::to_string(t);
  if (s >= 0) n += "_s" + std::to_string(s);
  return n;
}

const char* status_quantity(ModelKind kind) {
  switch (kind) {
    case ModelKind::kOnOffStandby:
      return "zon";
    case ModelKind::kOnOff:
      return "zoo";
    case ModelKind::kOnStandby:
      return "zos";
  }
  return "zon";
}

double max_piecewise_rate(const SegmentSet& seg) {
  double h = 0.0;
  for (const auto& s : seg.segments) h = std::max({h, s.value(s.p_lo), s.value(s.p_hi)});
  return h;
}

MilpInstance build(ModelKind kind, const PlantScenario& scn, const SegmentSet& seg) {
  validate(scn);
  if (seg.size() < 1) throw std::invalid_argument("segment set is empty");
  const int hours = scn.hours();
  if (hours < 1) throw std::invalid_argument("horizon must contain at least one hour");

  const bool has_startup = kind != ModelKind::kOnStandby;
  const bool has_import = kind != ModelKind::kOnOff;
  const double p_sb = scn.standby_load_mw;
  const double h_max = max_piecewise_rate(seg);
  const int n_seg = seg.size();

  MilpInstance m;
  auto cont = [&](const std::string& q, int t, double up, double obj, int s = -1) {
    return m.add_variable(var_name(q, t, s), VarKind::kContinuous, 0.0, up, obj, {q, t, s});
  };
  auto bin = [&](const std::string& q, int t, double obj = 0.0, int s = -1, double up = 1.0) {
    return m.add_variable(var_name(q, t, s), VarKind::kBinary, 0.0, up, obj, {q, t, s});
  };

  for (int t = 0; t < hours; ++t) {
    const double price = scn.prices(t);
    cont("d", t, h_max + scn.storage_max_output_kg_h, scn.hydrogen_price_eur_kg);
    cont("h", t, h_max, 0.0);
    cont("hd", t, h_max, 0.0);
    cont("p", t, scn.wind(t) + (has_import ? p_sb : 0.0), price);
    cont("pc", t, scn.compressor_mwh_kg * h_max, 0.0);
    if (has_import) cont("pin", t, p_sb, -scn.import_price(t));
    for (int s = 0; s < n_seg; ++s) cont("pseg", t, seg.segments[s].p_hi, 0.0, s);
    cont("s", t, scn.storage_capacity_kg, 0.0);
    cont("sin", t, h_max, 0.0);
    cont("sout", t, scn.storage_max_output_kg_h, 0.0);

    // Hour 0 has no predecessor: its start-up indicator is fixed at zero.
    if (has_startup) bin("zsu", t, -scn.startup_cost_eur, -1, t == 0 ? 0.0 : 1.0);
    bin(status_quantity(kind), t);
    if (kind == ModelKind::kOnOffStandby) {
      bin("zoff", t);
      bin("zsb", t);
    }
    for (int s = 0; s < n_seg; ++s) bin("zh", t, 0.0, s);
  }

  const std::string on = status_quantity(kind);
  for (int t = 0; t < hours; ++t) {
    auto v = [&](const std::string& q, int s = -1) { return m.at(q, t, s); };
    auto row = [&](const std::string& name) { return name + "_t" + std::to_string(t); };

    // Power balance: p = P_w + p_in - p_e - p_c with p_e = sum(pseg) + standby load.
    std::vector<Term> market{{v("p"), 1.0}, {v("pc"), 1.0}};
    for (int s = 0; s < n_seg; ++s) market.push_back({v("pseg", s), 1.0});
    double market_rhs = scn.wind(t);
    if (has_import) market.push_back({v("pin"), -1.0});
    if (kind == ModelKind::kOnOffStandby) market.push_back({v("zsb"), p_sb});
    if (kind == ModelKind::kOnStandby) {
      market.push_back({v("zos"), -p_sb});
      market_rhs -= p_sb;
    }
    m.add_row(row("market"), market, RowSense::kEq, market_rhs);

    if (kind == ModelKind::kOnOffStandby) {
      m.add_row(row("pin_cap"), {{v("pin"), 1.0}, {v("zsb"), -p_sb}}, RowSense::kLe, 0.0);
      m.add_row(row("status"), {{v("zon"), 1.0}, {v("zoff"), 1.0}, {v("zsb"), 1.0}}, RowSense::kEq, 1.0);
    } else if (kind == ModelKind::kOnStandby) {
      m.add_row(row("pin_cap"), {{v("pin"), 1.0}, {v("zos"), p_sb}}, RowSense::kLe, p_sb);
    }

    std::vector<Term> upper{{v(on), -scn.electrolyzer_capacity_mw}};
    std::vector<Term> lower{{v(on), -scn.minimum_load_mw}};
    for (int s = 0; s < n_seg; ++s) {
      upper.push_back({v("pseg", s), 1.0});
      lower.push_back({v("pseg", s), 1.0});
    }
    m.add_row(row("elec_max"), upper, RowSense::kLe, 0.0);
    m.add_row(row("elec_min"), lower, RowSense::kGe, 0.0);

    if (has_startup && t > 0) {
      const int on_prev = m.at(on, t - 1);
      std::vector<Term> start{{v("zsu"), 1.0}, {v(on), -1.0}, {on_prev, 1.0}};
      if (kind == ModelKind::kOnOffStandby) start.push_back({m.at("zsb", t - 1), 1.0});
      m.add_row(row("start"), start, RowSense::kGe, 0.0);
    }
    if (kind == ModelKind::kOnOffStandby && t > 0) {
      m.add_row(row("off_to_sb"), {{m.at("zoff", t - 1), 1.0}, {v("zsb"), 1.0}}, RowSense::kLe, 1.0);
    }

    std::vector<Term> hy{{v("h"), 1.0}};
    std::vector<Term> prod{{v(on), 1.0}};
    for (int s = 0; s < n_seg; ++s) {
      const Segment& sg = seg.segments[s];
      hy.push_back({v("pseg", s), -sg.slope});
      hy.push_back({v("zh", s), -sg.intercept});
      prod.push_back({v("zh", s), -1.0});
      m.add_row(row("seg_min") + "_s" + std::to_string(s), {{v("pseg", s), 1.0}, {v("zh", s), -sg.p_lo}},
                RowSense::kGe, 0.0);
      m.add_row(row("seg_max") + "_s" + std::to_string(s), {{v("pseg", s), 1.0}, {v("zh", s), -sg.p_hi}},
                RowSense::kLe, 0.0);
    }
    m.add_row(row("hy"), hy, RowSense::kEq, 0.0);
    m.add_row(row("prod"), prod, RowSense::kEq, 0.0);

    m.add_row(row("stor_in"), {{v("h"), 1.0}, {v("hd"), -1.0}, {v("sin"), -1.0}}, RowSense::kEq, 0.0);
    m.add_row(row("stor_out"), {{v("d"), 1.0}, {v("hd"), -1.0}, {v("sout"), -1.0}}, RowSense::kEq, 0.0);
    m.add_row(row("compressor"), {{v("pc"), 1.0}, {v("sin"), -scn.compressor_mwh_kg}}, RowSense::kEq, 0.0);
    std::vector<Term> balance{{v("s"), 1.0}, {v("sin"), -1.0}, {v("sout"), 1.0}};
    double balance_rhs = scn.initial_storage_kg;
    if (t > 0) {
      balance.push_back({m.at("s", t - 1), -1.0});
      balance_rhs = 0.0;
    }
    m.add_row(row("storage"), balance, RowSense::kEq, balance_rhs);
  }

  for (std::size_t n = 0; n < scn.demand.size(); ++n) {
    const auto& block = scn.demand[n];
    if (block.hours.empty()) continue;
    std::vector<Term> terms;
    for (int t : block.hours) terms.push_back({m.at("d", t), 1.0});
    m.add_row("demand_n" + std::to_string(n), terms, RowSense::kGe, block.min_kg);
  }
  return m;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kOnOffStandby:
      return "oos";
    case ModelKind::kOnOff:
      return "oo";
    case ModelKind::kOnStandby:
      return "os";
  }
  return "oos";
}

ModelKind parse_model_kind(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "oos") return ModelKind::kOnOffStandby;
  if (t == "oo") return ModelKind::kOnOff;
  if (t == "os") return ModelKind::kOnStandby;
  throw std::invalid_argument("unknown model '" + text + "'; expected oos, oo or os");
}

const char* to_string(ElectrolyzerState state) {
  switch (state) {
    case ElectrolyzerState::kOff:
      return "off";
    case ElectrolyzerState::kStandby:
      return "standby";
    case ElectrolyzerState::kOn:
      return "on";
  }
  return "off";
}

MilpInstance build_oos(const PlantScenario& scn, const SegmentSet& seg) {
  return build(ModelKind::kOnOffStandby, scn, seg);
}
MilpInstance build_oo(const PlantScenario& scn, const SegmentSet& seg) {
  return build(ModelKind::kOnOff, scn, seg);
}
MilpInstance build_os(const PlantScenario& scn, const SegmentSet& seg) {
  return build(ModelKind::kOnStandby, scn, seg);
}
MilpInstance build_model(ModelKind kind, const PlantScenario& scn, const SegmentSet& seg) {
  return build(kind, scn, seg);
}

int DispatchSchedule::count(ElectrolyzerState state) const {
  return static_cast<int>(std::count_if(hours.begin(), hours.end(),
                                        [&](const HourRecord& r) { return r.state == state; }));
}

int DispatchSchedule::startups() const {
  return static_cast<int>(std::count_if(hours.begin(), hours.end(), [](const HourRecord& r) { return r.startup; }));
}

double DispatchSchedule::hydrogen_kg() const {
  double sum = 0.0;
  for (const auto& r : hours) sum += r.hydrogen_kg;
  return sum;
}

DispatchSchedule decode_solution(const MilpInstance& inst, ModelKind kind, const PlantScenario& scn,
                                 const SegmentSet& seg, const Eigen::VectorXd& x, double tol) {
  if (x.size() != inst.num_variables()) {
    throw std::invalid_argument("decode_solution: value vector does not match the instance");
  }
  const FeasibilityReport rep = check_feasibility(inst, x);
  if (!rep.feasible(tol)) {
    std::ostringstream msg;
    msg << "schedule violates '" << rep.worst << "' by " << rep.max_violation;
    throw IntegrityError(rep.worst, msg.str());
  }

  DispatchSchedule out;
  out.model = kind;
  out.objective = inst.objective_value(x);
  const std::string on = status_quantity(kind);
  const int hours = scn.hours();

  for (int t = 0; t < hours; ++t) {
    auto val = [&](const std::string& q, int s = -1) { return x(inst.at(q, t, s)); };
    auto has = [&](const std::string& q) { return inst.find(VarKey{q, t, -1}).has_value(); };
    HourRecord r;
    const bool is_on = val(on) > 0.5;
    bool standby = false;
    if (kind == ModelKind::kOnOffStandby) standby = val("zsb") > 0.5;
    if (kind == ModelKind::kOnStandby) standby = !is_on;
    r.state = is_on ? ElectrolyzerState::kOn : standby ? ElectrolyzerState::kStandby : ElectrolyzerState::kOff;

    double seg_power = 0.0;
    for (int s = 0; s < seg.size(); ++s) {
      seg_power += val("pseg", s);
      if (val("zh", s) > 0.5) r.segment = s;
    }
    r.hydrogen_kg = val("h");
    r.delivered_kg = val("d");
    r.direct_kg = val("hd");
    r.storage_kg = val("s");
    r.storage_in_kg = val("sin");
    r.storage_out_kg = val("sout");
    r.sold_mw = val("p");
    r.compressor_mw = val("pc");
    r.bought_mw = has("pin") ? val("pin") : 0.0;
    r.startup = has("zsu") && val("zsu") > 0.5;
    r.consumption_mw = seg_power;
    out.hours.push_back(r);
  }

  for (auto& r : out.hours) {
    if (r.state == ElectrolyzerState::kStandby) r.consumption_mw += scn.standby_load_mw;
  }
  return out;
}

}  // namespace h2dispatch
