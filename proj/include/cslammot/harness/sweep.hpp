#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cslammot/harness/pipeline.hpp"

namespace cslammot::harness {

struct CollaboratorRow {
  int k = 0;
  RunReport report;
};

/// SLAM-channel sweep: each k in [0, k_max] runs in coop_slam_only mode with the top-k ranked
/// collaborators; k = 0 sends nothing and matches a single-vehicle run.
std::vector<CollaboratorRow> sweepCollaborators(const RunConfig& config, int k_max, unsigned threads = 0);

struct BudgetRow {
  /// Detection payload cap per neighbor and step; unset means unlimited.
  std::optional<std::uint64_t> budget;
  RunReport report;
};

/// Perception-channel sweep in the config's mode (full when it has no perception channel),
/// selective protocol.
std::vector<BudgetRow> sweepBudget(const RunConfig& config, const std::vector<std::optional<std::uint64_t>>& budgets,
                                   unsigned threads = 0);

/// Columns: k,ego_rmse,slam_bytes,slam_commvol,inter_vehicle_factors
void writeCollaboratorCsv(std::ostream& out, const std::vector<CollaboratorRow>& rows);
/// Columns: budget,perception_bytes,perception_commvol,ap_0.3,ap_0.5,ap_0.7,mota,detection_recall
void writeBudgetCsv(std::ostream& out, const std::vector<BudgetRow>& rows);

}  // namespace cslammot::harness
