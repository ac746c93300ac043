#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cslammot/harness/config.hpp"
#include "cslammot/harness/pipeline.hpp"
#include "cslammot/harness/replay.hpp"
#include "cslammot/harness/report.hpp"
#include "cslammot/harness/sensing.hpp"
#include "cslammot/harness/sweep.hpp"

namespace fs = std::filesystem;
using namespace cslammot;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
  unsigned threads = 0;
};

harness::RunConfig loadConfig(const Common& c) {
  auto cfg = harness::loadRunConfig(c.config);
  if (c.seed) cfg = harness::withSeed(cfg, *c.seed);
  if (!c.mode.empty()) cfg.mode = harness::parseMode(c.mode);
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.validate();
  return cfg;
}

void writeFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::optional<std::uint64_t>> parseBudgets(const std::string& text) {
  std::vector<std::optional<std::uint64_t>> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "inf" || item == "unlimited") {
      out.emplace_back(std::nullopt);
    } else {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument("bad budget '" + item + "'");
      out.emplace_back(v);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty budget list");
  return out;
}

void addCommon(CLI::App* app, Common& c, bool need_out) {
  app->add_option("--config", c.config, "Run configuration (YAML)")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Override the seed");
  app->add_option("--mode", c.mode, "single_vehicle | coop_slam_only | coop_perception_only | full");
  auto* out = app->add_option("--out", c.out, "Output directory");
  if (need_out) out->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative SLAMMOT simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Run the pipeline and write a report");
  addCommon(run, run_opts, true);

  Common k_opts;
  int k_max = 3;
  auto* sweep_k = app.add_subcommand("sweep-k", "Sweep the number of SLAM collaborators");
  addCommon(sweep_k, k_opts, false);
  sweep_k->add_option("--k-max", k_max, "Largest collaborator count")->check(CLI::NonNegativeNumber);
  sweep_k->add_option("--threads", k_opts.threads, "Worker threads (0 = all cores)");

  Common b_opts;
  std::string budgets = "0,1000,5000,inf";
  auto* sweep_b = app.add_subcommand("sweep-budget", "Sweep the per-neighbor detection payload budget");
  addCommon(sweep_b, b_opts, false);
  sweep_b->add_option("--budgets", budgets, "Comma-separated bytes per neighbor and step; 'inf' for unlimited");
  sweep_b->add_option("--threads", b_opts.threads, "Worker threads (0 = all cores)");

  Common t_opts;
  std::string trace_out;
  auto* trace = app.add_subcommand("trace", "Record the sensor stream of a scenario as a trace file");
  trace->add_option("--config", t_opts.config, "Run configuration (YAML)")->required()->check(CLI::ExistingFile);
  trace->add_option("--seed", t_opts.seed, "Override the seed");
  trace->add_option("--out", trace_out, "Trace file")->required();

  std::string replay_trace;
  std::string replay_config;
  auto* replay = app.add_subcommand("replay", "Single-vehicle estimation from a trace file");
  replay->add_option("--trace", replay_trace, "Trace file")->required()->check(CLI::ExistingFile);
  replay->add_option("--config", replay_config, "Run configuration for backend parameters")
      ->check(CLI::ExistingFile);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Print the summary table of a run directory");
  report->add_option("--dir", report_dir, "Output directory of a run")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = loadConfig(run_opts);
      const auto rep = harness::run(cfg);
      harness::printSummary(std::cout, harness::reportToJson(rep));
    } else if (*sweep_k) {
      const auto cfg = loadConfig(k_opts);
      const auto rows = harness::sweepCollaborators(cfg, k_max, k_opts.threads);
      std::ostringstream csv;
      harness::writeCollaboratorCsv(csv, rows);
      std::cout << csv.str();
      if (!k_opts.out.empty()) writeFile(fs::path(k_opts.out) / "sweep_k.csv", csv.str());
    } else if (*sweep_b) {
      const auto cfg = loadConfig(b_opts);
      const auto rows = harness::sweepBudget(cfg, parseBudgets(budgets), b_opts.threads);
      std::ostringstream csv;
      harness::writeBudgetCsv(csv, rows);
      std::cout << csv.str();
      if (!b_opts.out.empty()) writeFile(fs::path(b_opts.out) / "sweep_budget.csv", csv.str());
    } else if (*trace) {
      const auto cfg = loadConfig(t_opts);
      std::ostringstream text;
      sim::writeTrace(text, harness::recordTrace(cfg.scenario));
      writeFile(trace_out, text.str());
    } else if (*replay) {
      graph::BackendParams params;
      if (!replay_config.empty()) params = harness::loadRunConfig(replay_config).backend;
      std::ifstream in(replay_trace);
      const auto rows = harness::replayTrace(sim::readTrace(in), params);
      std::cout << "vehicle,steps,mean,rmse,dr_mean,dr_rmse\n";
      for (const auto& r : rows) {
        std::cout << r.vehicle << ',' << r.steps << ',' << r.accuracy.mean.value_or(NAN) << ','
                  << r.accuracy.rmse.value_or(NAN) << ',' << r.dead_reckoning.mean.value_or(NAN) << ','
                  << r.dead_reckoning.rmse.value_or(NAN) << '\n';
      }
    } else if (*report) {
      std::ifstream in(fs::path(report_dir) / "summary.json");
      if (!in) throw std::runtime_error("no summary.json in " + report_dir);
      harness::printSummary(std::cout, nlohmann::json::parse(in));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
