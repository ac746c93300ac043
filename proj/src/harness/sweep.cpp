#include "cslammot/harness/sweep.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace cslammot::harness {

namespace {

std::string num(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::string vol(const comms::CommVol& v) { return v.no_communication ? "" : num(v.value); }

}  // namespace

std::vector<CollaboratorRow> sweepCollaborators(const RunConfig& config, int k_max, unsigned threads) {
  if (k_max < 0) throw std::invalid_argument("sweepCollaborators: k_max must be >= 0");
  if (k_max >= static_cast<int>(config.scenario.vehicles.size())) {
    throw std::invalid_argument("sweepCollaborators: k_max must be below the vehicle count");
  }
  std::vector<RunConfig> configs;
  for (int k = 0; k <= k_max; ++k) {
    RunConfig c = config;
    c.mode = Mode::kCoopSlamOnly;
    c.selection.k_collaborators = k;
    c.output_dir.clear();
    configs.push_back(std::move(c));
  }
  auto results = runAll(configs, threads);
  std::vector<CollaboratorRow> rows;
  for (int k = 0; k <= k_max; ++k) rows.push_back({k, std::move(results[static_cast<std::size_t>(k)].report)});
  return rows;
}

std::vector<BudgetRow> sweepBudget(const RunConfig& config, const std::vector<std::optional<std::uint64_t>>& budgets,
                                   unsigned threads) {
  std::vector<RunConfig> configs;
  for (const auto& b : budgets) {
    RunConfig c = config;
    if (!usesPerceptionChannel(c.mode)) c.mode = Mode::kFull;
    c.perception = PerceptionProtocol::kSelective;
    c.selection.perception_budget_bytes = b;
    c.output_dir.clear();
    configs.push_back(std::move(c));
  }
  auto results = runAll(configs, threads);
  std::vector<BudgetRow> rows;
  for (std::size_t i = 0; i < budgets.size(); ++i) rows.push_back({budgets[i], std::move(results[i].report)});
  return rows;
}

void writeCollaboratorCsv(std::ostream& out, const std::vector<CollaboratorRow>& rows) {
  out << "k,ego_rmse,slam_bytes,slam_commvol,inter_vehicle_factors\n";
  for (const auto& r : rows) {
    std::size_t factors = 0;
    for (const auto& e : r.report.egos) factors += e.inter_vehicle_factors;
    out << r.k << ',' << num(r.report.meanEgoRmse()) << ',' << r.report.slam_bytes << ','
        << vol(r.report.slam_commvol) << ',' << factors << '\n';
  }
}

void writeBudgetCsv(std::ostream& out, const std::vector<BudgetRow>& rows) {
  out << "budget,perception_bytes,perception_commvol,ap_0.3,ap_0.5,ap_0.7,mota,detection_recall\n";
  for (const auto& r : rows) {
    out << (r.budget ? std::to_string(*r.budget) : std::string("inf")) << ',' << r.report.perception_bytes << ','
        << vol(r.report.perception_commvol) << ',' << num(r.report.ap[0]) << ',' << num(r.report.ap[1]) << ','
        << num(r.report.ap[2]) << ',' << num(r.report.mota) << ',' << num(r.report.detection_recall.value()) << '\n';
  }
}

}  // namespace cslammot::harness
