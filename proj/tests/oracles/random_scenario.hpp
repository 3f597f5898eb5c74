#pragma once

// Seeded random scenarios on the reference plant. Demand minimums are capped
// at a fraction of what the one-segment curve can produce from the available
// wind inside each block, so every generated scenario is feasible.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "h2dispatch/scenario.hpp"
#include "h2dispatch/segmentation.hpp"

namespace oracle {

struct RandomScenarioOptions {
  int hours = 48;
  double price_mean = 37.0;
  double price_spread = 15.0;
  /// Probability of a price spike to 60-120 EUR/MWh in an hour.
  double spike_probability = 0.05;
  double cf_persistence = 0.8;
  double demand_fraction = 0.6;  // cap relative to feasible production
};

inline h2dispatch::PlantScenario random_scenario(unsigned seed, const RandomScenarioOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  h2dispatch::PlantScenario scn = h2dispatch::reference_plant();
  Eigen::VectorXd prices(opt.hours), cf(opt.hours);
  double level = unit(rng);
  for (int t = 0; t < opt.hours; ++t) {
    const double daily = std::sin(2.0 * M_PI * ((t % 24) - 6) / 24.0);
    double p = opt.price_mean + 0.5 * opt.price_spread * daily + opt.price_spread * 0.5 * noise(rng);
    if (unit(rng) < opt.spike_probability) p = 60.0 + 60.0 * unit(rng);
    prices(t) = std::round(p * 100.0) / 100.0;
    level = opt.cf_persistence * level + (1.0 - opt.cf_persistence) * unit(rng) + 0.1 * noise(rng);
    level = std::clamp(level, 0.0, 1.0);
    cf(t) = level;
  }
  std::vector<std::string> stamps;
  h2dispatch::set_series(scn, stamps, prices, cf);

  const h2dispatch::SegmentSet one = h2dispatch::make_segments(scn.physics, scn.minimum_load_mw, 1);
  for (auto& block : scn.demand) {
    double potential = 0.0;
    for (int t : block.hours) {
      const double p = std::min(scn.wind(t), scn.electrolyzer_capacity_mw);
      if (p >= scn.minimum_load_mw) potential += one.segments[0].value(p);
    }
    block.min_kg = std::min(block.min_kg, opt.demand_fraction * potential);
  }
  return scn;
}

}  // namespace oracle
