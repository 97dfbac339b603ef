#pragma once

#include <optional>
#include <string>

#include "tw/evolve.hpp"
#include "tw/genome.hpp"
#include "tw/kgraph.hpp"
#include "tw/narrative.hpp"

namespace tw {

// On-disk plan exchange format. Generated plans carry the genome and fitness
// breakdown for replay; hand-written files need only the day fields, so
// genome, fitness, and seed are optional on input.
struct PlanFile {
  ItineraryPlan plan;
  std::optional<PlanGenome> genome;
  std::optional<FitnessReport> fitness;
  uint64_t seed = 0;
};

std::string plan_to_json_text(const PlanFile& file);
PlanFile plan_from_json_text(std::string_view text,
                             const std::string& origin = "<inline>");
PlanFile load_plan(const std::string& path);
void save_plan(const PlanFile& file, const std::string& path);

// Full reading script: worldview, characters, exposition, then one scene per
// stop with its four act lines, "— Transition —" blocks between stops.
std::string render_script_text(const ScriptBundle& bundle,
                               const KnowledgeGraph& graph);

}  // namespace tw
