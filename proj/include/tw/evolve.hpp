#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tw/constraints.hpp"
#include "tw/genome.hpp"
#include "tw/kgraph.hpp"
#include "tw/narrative.hpp"

namespace tw {

struct FitnessWeights {
  double w1 = 1.0;
  double w2 = 1.0;
  // Popularity magnitudes dwarf the other terms; the default keeps them
  // comparable on desk-scale data.
  double w3 = 0.001;
};

struct FitnessReport {
  // Mean transition smoothness over the travel legs; neutral 3.0 when the
  // plan has fewer than two visits.
  double f1 = 0.0;
  // Sum of reciprocal leg travel times, 1/hours.
  double term2 = 0.0;
  // Sum of visited attractions' popularity.
  double term3 = 0.0;
  double total = 0.0;
  int hard_violations = 0;
  int commonsense_violations = 0;
};

struct ConstraintSet {
  std::vector<ConstraintDef> defs;
  QueryParams params;
};

enum class EvalMode { Serial, Parallel };

struct GaConfig {
  int pop_num = 20;
  double p_m = 0.2;
  double p_z = 0.3;
  int max_generations = 100;
  int tournament_size = 2;
  FitnessWeights weights;
  uint64_t seed = 0;
  int days = 1;
  EvalMode eval_mode = EvalMode::Parallel;

  void validate() const;
};

inline constexpr double kNeutralSmoothness = 3.0;

// Travel legs of a plan: adjacent visit pairs across the whole sequence,
// day boundaries included. Legs with equal endpoints are dropped.
std::vector<std::pair<std::string, std::string>> adjacent_pairs(
    const ItineraryPlan& plan);

double total_travel_hours(const ItineraryPlan& plan,
                          const KnowledgeGraph& graph);

// Scores one decoded plan. Smoothness values must already sit in the source;
// this function never generates text.
FitnessReport fitness(const ItineraryPlan& plan,
                      const SmoothnessSource& smoothness,
                      const KnowledgeGraph& graph,
                      const FitnessWeights& weights,
                      const ConstraintSet& constraints,
                      double neutral_smoothness = kNeutralSmoothness);

// Negative when a ranks before b: fewer hard violations, then fewer
// commonsense violations, then larger total, then serialized-genome bytes.
int compare(const FitnessReport& a, const std::string& key_a,
            const FitnessReport& b, const std::string& key_b);

// Strict report-only ordering used inside tournaments; ties stay ties so the
// first-drawn contestant keeps them.
bool report_better(const FitnessReport& a, const FitnessReport& b);

struct Evaluated {
  PlanGenome genome;
  FitnessReport report;
  // serialize() of the genome, cached for tie-breaking.
  std::string key;
};

// Winner of a binary tournament: two distinct uniform draws, compare by
// report, first draw keeps ties.
const Evaluated& tournament_select(const std::vector<Evaluated>& population,
                                   Rng& rng);

struct EvalContext {
  const KnowledgeGraph& graph;
  const RegionLayout& layout;
  const ConstraintSet& constraints;
  FitnessWeights weights;
};

// Decodes and scores every genome. Serial and Parallel produce identical
// reports; Parallel spreads genomes over OpenMP threads.
std::vector<FitnessReport> evaluate_all(const std::vector<PlanGenome>& genomes,
                                        const EvalContext& ctx,
                                        const SmoothnessSource& smoothness,
                                        EvalMode mode);

// One elitist step: every member breeds one offspring (partner by
// tournament, two-point crossover, mutation), offspring legs are batch
// scored, and the best pop_num of parents plus offspring survive. Offspring
// randomness comes from per-offspring streams derived from (seed,
// generation, parent index), so evaluation order cannot change results.
std::vector<Evaluated> evolve_generation(const std::vector<Evaluated>& population,
                                         const GaConfig& cfg,
                                         const EvalContext& ctx,
                                         SmoothnessSource& smoothness,
                                         int generation);

struct GenerationStats {
  int generation = 0;
  double best_total = 0.0;
  double mean_total = 0.0;
  int best_hard_violations = 0;
  int best_commonsense_violations = 0;
  std::size_t distinct_pairs_scored = 0;
};

struct RunResult {
  Evaluated best;
  std::vector<GenerationStats> history;
  std::vector<Evaluated> final_population;
};

// Full optimization: seeded init, max_generations elitist steps, history row
// per generation describing the compare-best individual.
RunResult run(const GaConfig& cfg, const EvalContext& ctx,
              SmoothnessSource& smoothness);

std::string history_csv(const std::vector<GenerationStats>& history);

}  // namespace tw
