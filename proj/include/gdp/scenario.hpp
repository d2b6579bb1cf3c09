#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gdp/dag.hpp"
#include "gdp/model.hpp"
#include "gdp/prior.hpp"

namespace gdp {

// Edge list of the eight-group study design: one root, three binary factors,
// layer sizes 1-3-3-1.
std::vector<std::pair<int, int>> eight_group_edges();

// Built-in simulation scenarios, named "<family>-<size>" with family "easy"
// (four well-separated clusters, prior-drawn weights) or "difficult" (ten
// overlapping clusters, fixed weights) and size one of small, moderate,
// large, unbalanced.
std::vector<std::string> scenario_names();

bool is_known_scenario(const std::string& name);

// Data-generation recipe for a named scenario. Throws UnknownScenario.
ScenarioSpec scenario_spec(const std::string& name);

// Fitting configuration matched to the scenario family. The full schedules
// are 15000/5000 (easy) and 25000/15000 with thinning 5 (difficult);
// paper_scale=false shrinks both to 3000/1000 without thinning.
GdpConfig scenario_fit_config(const std::string& name, bool paper_scale);

}  // namespace gdp
