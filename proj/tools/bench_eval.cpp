#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tw/evolve.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compare serial and parallel population evaluation"};
  std::string graph_path;
  int pop = 200;
  int days = 2;
  int reps = 20;
  uint64_t seed = 7;
  app.add_option("--graph", graph_path, "knowledge graph file")->required();
  app.add_option("--pop", pop, "population size");
  app.add_option("--days", days, "trip length in days");
  app.add_option("--reps", reps, "evaluation passes per mode");
  app.add_option("--seed", seed, "population seed");
  CLI11_PARSE(app, argc, argv);

  try {
    tw::KnowledgeGraph graph = tw::KnowledgeGraph::load(graph_path);
    tw::RegionLayout layout = tw::RegionLayout::from_graph(graph);
    tw::Rng rng(seed);
    std::vector<tw::PlanGenome> population =
        tw::init_population(layout, days, pop, 0.3, rng);

    tw::TableSmoothness smoothness;
    tw::Rng score_rng(seed ^ 0x5eedULL);
    for (const auto& a : graph.nodes()) {
      for (const auto& b : graph.nodes()) {
        if (a.id == b.id) continue;
        smoothness.set(a.id, b.id, 1.0 + 4.0 * score_rng.next_unit());
      }
    }

    tw::QueryParams query;
    query.name = "bench";
    query.days = days;
    tw::ConstraintSet constraints{tw::builtin_constraint_set(), query};
    tw::EvalContext ctx{graph, layout, constraints, tw::FitnessWeights{}};

    auto time_mode = [&](tw::EvalMode mode) {
      tw::evaluate_all(population, ctx, smoothness, mode);  // warm-up
      auto start = Clock::now();
      std::vector<tw::FitnessReport> reports;
      for (int r = 0; r < reps; ++r) {
        reports = tw::evaluate_all(population, ctx, smoothness, mode);
      }
      return std::make_pair(ms_since(start) / reps, reports);
    };

    auto [serial_ms, serial_reports] = time_mode(tw::EvalMode::Serial);
    auto [parallel_ms, parallel_reports] = time_mode(tw::EvalMode::Parallel);

    bool identical = serial_reports.size() == parallel_reports.size();
    for (std::size_t i = 0; identical && i < serial_reports.size(); ++i) {
      identical = serial_reports[i].total == parallel_reports[i].total &&
                  serial_reports[i].hard_violations ==
                      parallel_reports[i].hard_violations &&
                  serial_reports[i].commonsense_violations ==
                      parallel_reports[i].commonsense_violations;
    }

    std::cout << "population: " << pop << " genomes, " << days << " day(s), "
              << reps << " passes per mode\n";
    std::cout << "serial:   " << serial_ms << " ms per pass\n";
    std::cout << "parallel: " << parallel_ms << " ms per pass\n";
    if (parallel_ms > 0.0) {
      std::cout << "speedup:  " << serial_ms / parallel_ms << "x\n";
    }
    std::cout << "identical reports: " << (identical ? "yes" : "NO") << "\n";
    return identical ? 0 : 1;
  } catch (const tw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
