#pragma once

#include "simulate/config.hpp"
#include "simulate/output.hpp"

namespace simulate {

// Dispatches a validated config to the computation modules. Scan points run
// on `parallel` workers; rows always come back in grid order. Module
// exceptions propagate to the caller.
RunResult run_scenario(const ScenarioConfig& cfg, int parallel);

}  // namespace simulate
