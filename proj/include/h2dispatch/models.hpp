#pragma once

// MILP formulations of the day-ahead dispatch: three-state (on/off/standby),
// on-off and on-standby variants.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "h2dispatch/milp.hpp"
#include "h2dispatch/scenario.hpp"
#include "h2dispatch/segmentation.hpp"

namespace h2dispatch {

enum class ModelKind : std::uint8_t { kOnOffStandby, kOnOff, kOnStandby };

/// "oos", "oo", "os".
std::string to_string(ModelKind kind);
/// Case-insensitive; throws std::invalid_argument.
ModelKind parse_model_kind(const std::string& text);

MilpInstance build_oos(const PlantScenario& scn, const SegmentSet& seg);
MilpInstance build_oo(const PlantScenario& scn, const SegmentSet& seg);
MilpInstance build_os(const PlantScenario& scn, const SegmentSet& seg);
MilpInstance build_model(ModelKind kind, const PlantScenario& scn, const SegmentSet& seg);

enum class ElectrolyzerState : std::uint8_t { kOff, kStandby, kOn };
const char* to_string(ElectrolyzerState state);

struct HourRecord {
  ElectrolyzerState state = ElectrolyzerState::kOff;
  int segment = -1;            // active segment when on
  double consumption_mw = 0;   // segment power plus standby load
  double hydrogen_kg = 0;      // piecewise production
  double delivered_kg = 0;     // to demand
  double direct_kg = 0;        // production sent straight to demand
  double storage_kg = 0;       // level at the end of the hour
  double storage_in_kg = 0;
  double storage_out_kg = 0;
  double sold_mw = 0;
  double bought_mw = 0;
  double compressor_mw = 0;
  bool startup = false;
};

struct DispatchSchedule {
  ModelKind model = ModelKind::kOnOffStandby;
  std::vector<HourRecord> hours;
  double objective = 0.0;  // estimated profit, EUR

  int count(ElectrolyzerState state) const;
  int startups() const;
  double hydrogen_kg() const;
};

/// Reads the per-hour schedule off `x` after checking every row and bound at 1e-6.
/// Throws IntegrityError naming the violated constraint.
DispatchSchedule decode_solution(const MilpInstance& inst, ModelKind kind, const PlantScenario& scn,
                                 const SegmentSet& seg, const Eigen::VectorXd& x, double tol = 1e-6);

}  // namespace h2dispatch
