#pragma once

#include "leasesim/scenario.hpp"
#include "leasesim/trace.hpp"

namespace leasesim {

// Runs the scenario to its horizon under the deterministic event kernel and
// returns the full trace. Throws ConfigError for invalid scenarios and
// LeadershipViolation / ProtocolBug if a run breaks an internal contract.
Trace run_scenario(const Scenario& s);

}  // namespace leasesim
