#pragma once

#include <iosfwd>

#include "cslammot/graph/factor_graph.hpp"

namespace cslammot::graph {

/// Removes every variable with stamp < `cutoff_stamp`. Factors touching them are linearized at
/// `linearization` and folded into one dense marginal factor on the remaining variables they
/// touched (Schur complement).
FactorGraph marginalizeBefore(const FactorGraph& graph, const Values& linearization, int cutoff_stamp);

/// Keeps the newest `horizon` stamps: cutoff = newest stamp - horizon + 1. Throws if horizon < 2.
FactorGraph slideWindow(const FactorGraph& graph, const Values& linearization, int horizon);

/// Line-delimited dump: one "var" line per variable (with its value if present) and one
/// "factor" line per factor.
void writeSnapshot(std::ostream& out, const FactorGraph& graph, const Values& values);

}  // namespace cslammot::graph
