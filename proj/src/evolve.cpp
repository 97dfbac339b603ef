#include "tw/evolve.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tw {

namespace {

void append_row(std::string& out, const GenerationStats& row) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%d,%d,%zu\n", row.generation,
                row.best_total, row.mean_total, row.best_hard_violations,
                row.best_commonsense_violations, row.distinct_pairs_scored);
  out += buf;
}

FitnessReport evaluate_one(const PlanGenome& genome, const EvalContext& ctx,
                           const SmoothnessSource& smoothness) {
  ItineraryPlan plan = decode(genome, ctx.graph);
  return fitness(plan, smoothness, ctx.graph, ctx.weights, ctx.constraints);
}

std::vector<std::pair<std::string, std::string>> collect_pairs(
    const std::vector<PlanGenome>& genomes, const KnowledgeGraph& graph) {
  std::set<std::pair<std::string, std::string>> distinct;
  for (const PlanGenome& g : genomes) {
    ItineraryPlan plan = decode(g, graph);
    for (auto& p : adjacent_pairs(plan)) distinct.insert(std::move(p));
  }
  return {distinct.begin(), distinct.end()};
}

std::vector<Evaluated> make_evaluated(std::vector<PlanGenome> genomes,
                                      std::vector<FitnessReport> reports) {
  std::vector<Evaluated> out;
  out.reserve(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    Evaluated e;
    e.key = genomes[i].serialize();
    e.genome = std::move(genomes[i]);
    e.report = reports[i];
    out.push_back(std::move(e));
  }
  return out;
}

void sort_population(std::vector<Evaluated>& population) {
  // stable_sort keeps the merge order (parents before offspring) on full
  // ties, which pins the survivor set for a given seed.
  std::stable_sort(population.begin(), population.end(),
                   [](const Evaluated& a, const Evaluated& b) {
                     return compare(a.report, a.key, b.report, b.key) < 0;
                   });
}

}  // namespace

void GaConfig::validate() const {
  if (pop_num < 2) throw ConfigError("pop_num must be at least 2");
  if (max_generations < 1) {
    throw ConfigError("max_generations must be at least 1");
  }
  if (tournament_size != 2) {
    throw ConfigError("tournament_size is fixed at 2");
  }
  if (p_m < 0.0 || p_m > 1.0) throw ConfigError("p_m must lie in [0,1]");
  if (p_z < 0.0 || p_z > 1.0) throw ConfigError("p_z must lie in [0,1]");
  if (days < 1) throw ConfigError("days must be at least 1");
  if (weights.w1 < 0.0 || weights.w2 < 0.0 || weights.w3 < 0.0) {
    throw ConfigError("fitness weights must be nonnegative");
  }
  if (weights.w1 == 0.0 && weights.w2 == 0.0 && weights.w3 == 0.0) {
    throw ConfigError("at least one fitness weight must be positive");
  }
}

std::vector<std::pair<std::string, std::string>> adjacent_pairs(
    const ItineraryPlan& plan) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i + 1 < plan.sequence.size(); ++i) {
    if (plan.sequence[i] == plan.sequence[i + 1]) continue;
    pairs.emplace_back(plan.sequence[i], plan.sequence[i + 1]);
  }
  return pairs;
}

double total_travel_hours(const ItineraryPlan& plan,
                          const KnowledgeGraph& graph) {
  double sum = 0.0;
  for (const auto& [from, to] : adjacent_pairs(plan)) {
    sum += graph.travel_time(from, to);
  }
  return sum;
}

FitnessReport fitness(const ItineraryPlan& plan,
                      const SmoothnessSource& smoothness,
                      const KnowledgeGraph& graph,
                      const FitnessWeights& weights,
                      const ConstraintSet& constraints,
                      double neutral_smoothness) {
  if (weights.w1 < 0.0 || weights.w2 < 0.0 || weights.w3 < 0.0 ||
      (weights.w1 == 0.0 && weights.w2 == 0.0 && weights.w3 == 0.0)) {
    throw ConfigError("fitness weights must be nonnegative with one positive");
  }
  FitnessReport report;
  std::vector<std::pair<std::string, std::string>> legs = adjacent_pairs(plan);
  if (legs.empty()) {
    report.f1 = neutral_smoothness;
  } else {
    double sum = 0.0;
    for (const auto& [from, to] : legs) sum += smoothness.get(from, to);
    report.f1 = sum / static_cast<double>(legs.size());
  }
  for (const auto& [from, to] : legs) {
    double hours = graph.travel_time(from, to);
    // A zero-length leg earns nothing rather than a singularity.
    if (hours > 0.0) report.term2 += 1.0 / hours;
  }
  for (const std::string& id : plan.sequence) {
    report.term3 += graph.node(id).popularity;
  }
  report.total = weights.w1 * report.f1 + weights.w2 * report.term2 +
                 weights.w3 * report.term3;
  ConstraintReport checks =
      evaluate_plan(plan, constraints.params, graph, constraints.defs);
  report.hard_violations =
      checks.total_count(ConstraintCategory::Hard) -
      checks.passed_count(ConstraintCategory::Hard);
  report.commonsense_violations =
      checks.total_count(ConstraintCategory::Commonsense) -
      checks.passed_count(ConstraintCategory::Commonsense);
  return report;
}

int compare(const FitnessReport& a, const std::string& key_a,
            const FitnessReport& b, const std::string& key_b) {
  if (a.hard_violations != b.hard_violations) {
    return a.hard_violations < b.hard_violations ? -1 : 1;
  }
  if (a.commonsense_violations != b.commonsense_violations) {
    return a.commonsense_violations < b.commonsense_violations ? -1 : 1;
  }
  if (a.total != b.total) return a.total > b.total ? -1 : 1;
  int c = key_a.compare(key_b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool report_better(const FitnessReport& a, const FitnessReport& b) {
  if (a.hard_violations != b.hard_violations) {
    return a.hard_violations < b.hard_violations;
  }
  if (a.commonsense_violations != b.commonsense_violations) {
    return a.commonsense_violations < b.commonsense_violations;
  }
  return a.total > b.total;
}

const Evaluated& tournament_select(const std::vector<Evaluated>& population,
                                   Rng& rng) {
  if (population.size() < 2) {
    throw ValidationError("tournament needs a population of at least 2");
  }
  std::size_t n = population.size();
  std::size_t first = rng.index(n);
  std::size_t second = rng.index(n - 1);
  if (second >= first) ++second;
  if (report_better(population[second].report, population[first].report)) {
    return population[second];
  }
  return population[first];
}

std::vector<FitnessReport> evaluate_all(const std::vector<PlanGenome>& genomes,
                                        const EvalContext& ctx,
                                        const SmoothnessSource& smoothness,
                                        EvalMode mode) {
  std::vector<FitnessReport> reports(genomes.size());
  if (mode == EvalMode::Serial) {
    for (std::size_t i = 0; i < genomes.size(); ++i) {
      reports[i] = evaluate_one(genomes[i], ctx, smoothness);
    }
    return reports;
  }
  std::exception_ptr first_error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(genomes.size()); ++i) {
    try {
      reports[static_cast<std::size_t>(i)] =
          evaluate_one(genomes[static_cast<std::size_t>(i)], ctx, smoothness);
    } catch (...) {
#pragma omp critical
      {
        if (!first_error) first_error = std::current_exception();
      }
    }
  }
#else
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    reports[i] = evaluate_one(genomes[i], ctx, smoothness);
  }
#endif
  if (first_error) std::rethrow_exception(first_error);
  return reports;
}

std::vector<Evaluated> evolve_generation(const std::vector<Evaluated>& population,
                                         const GaConfig& cfg,
                                         const EvalContext& ctx,
                                         SmoothnessSource& smoothness,
                                         int generation) {
  cfg.validate();
  if (population.size() != static_cast<std::size_t>(cfg.pop_num)) {
    throw ValidationError("population size " +
                          std::to_string(population.size()) +
                          " does not match pop_num " +
                          std::to_string(cfg.pop_num));
  }
  // Breeding is sequential and cheap; every offspring draws only from its
  // own derived stream.
  std::vector<PlanGenome> offspring;
  offspring.reserve(population.size());
  for (std::size_t parent = 0; parent < population.size(); ++parent) {
    uint64_t child_seed = derive_seed(cfg.seed, static_cast<uint64_t>(generation),
                                      static_cast<uint64_t>(parent));
    Rng child_rng(child_seed);
    const Evaluated& partner = tournament_select(population, child_rng);
    PlanGenome child = crossover(population[parent].genome, partner.genome,
                                 ctx.layout, child_rng);
    child = mutate(child, cfg.p_m, ctx.layout, child_rng);
    child.rng_seed = child_seed;
    offspring.push_back(std::move(child));
  }
  smoothness.ensure(collect_pairs(offspring, ctx.graph));
  std::vector<FitnessReport> reports =
      evaluate_all(offspring, ctx, smoothness, cfg.eval_mode);
  std::vector<Evaluated> merged = population;
  std::vector<Evaluated> scored =
      make_evaluated(std::move(offspring), std::move(reports));
  for (Evaluated& e : scored) merged.push_back(std::move(e));
  sort_population(merged);
  merged.resize(population.size());
  return merged;
}

RunResult run(const GaConfig& cfg, const EvalContext& ctx,
              SmoothnessSource& smoothness) {
  cfg.validate();
  Rng master(cfg.seed);
  std::vector<PlanGenome> genomes =
      init_population(ctx.layout, cfg.days, cfg.pop_num, cfg.p_z, master);
  for (PlanGenome& g : genomes) g.rng_seed = cfg.seed;
  smoothness.ensure(collect_pairs(genomes, ctx.graph));
  std::vector<FitnessReport> reports =
      evaluate_all(genomes, ctx, smoothness, cfg.eval_mode);
  std::vector<Evaluated> population =
      make_evaluated(std::move(genomes), std::move(reports));
  sort_population(population);

  RunResult result;
  for (int gen = 1; gen <= cfg.max_generations; ++gen) {
    population = evolve_generation(population, cfg, ctx, smoothness, gen);
    GenerationStats stats;
    stats.generation = gen;
    stats.best_total = population.front().report.total;
    double sum = 0.0;
    for (const Evaluated& e : population) sum += e.report.total;
    stats.mean_total = sum / static_cast<double>(population.size());
    stats.best_hard_violations = population.front().report.hard_violations;
    stats.best_commonsense_violations =
        population.front().report.commonsense_violations;
    stats.distinct_pairs_scored = smoothness.scored_count();
    result.history.push_back(stats);
  }
  result.best = population.front();
  result.final_population = std::move(population);
  return result;
}

std::string history_csv(const std::vector<GenerationStats>& history) {
  std::string out =
      "generation,best_total,mean_total,hard_viol,cs_viol,"
      "distinct_pairs_scored\n";
  for (const GenerationStats& row : history) append_row(out, row);
  return out;
}

}  // namespace tw
