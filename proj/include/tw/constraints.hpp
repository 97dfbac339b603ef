#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tw/genome.hpp"
#include "tw/kgraph.hpp"

namespace tw {

enum class ConstraintCategory { Commonsense, Hard };

std::string_view constraint_category_name(ConstraintCategory category);

// What the traveler asked for; hard constraints read these fields.
struct QueryParams {
  std::string name;
  std::string origin;
  std::string destination;
  int days = 1;
  std::optional<double> budget;
  int party_size = 1;
  std::optional<std::string> room_type;
  std::vector<std::string> cuisines;
  std::vector<std::string> transport_exclude;
  std::string note;

  static QueryParams from_json_text(std::string_view text,
                                    const std::string& origin_name = "<inline>");
  std::string to_json_text() const;
};

std::vector<QueryParams> load_queries(const std::string& path);

struct ConstraintDef {
  std::string id;
  ConstraintCategory category;
  std::string description;
  std::function<bool(const ItineraryPlan&, const QueryParams&,
                     const KnowledgeGraph&)>
      check;
};

// Six commonsense checks and four hard checks.
std::vector<ConstraintDef> builtin_constraint_set();

std::vector<ConstraintDef> filter_constraints(
    std::vector<ConstraintDef> defs, const std::vector<std::string>& disabled);

// Total trip cost for the party: tickets, meals, and lodging. Transport is
// outside the cost model.
double plan_cost(const ItineraryPlan& plan, const QueryParams& params,
                 const KnowledgeGraph& graph);

struct ConstraintResult {
  std::string id;
  ConstraintCategory category;
  bool passed = false;
};

struct ConstraintReport {
  bool delivered = true;
  std::vector<ConstraintResult> results;

  int passed_count(ConstraintCategory category) const;
  int total_count(ConstraintCategory category) const;
  bool all_passed(ConstraintCategory category) const;
  bool all_passed() const;

  // Failure report for a run that produced no plan: every check fails.
  static ConstraintReport undelivered(const std::vector<ConstraintDef>& defs);
};

ConstraintReport evaluate_plan(const ItineraryPlan& plan,
                               const QueryParams& params,
                               const KnowledgeGraph& graph,
                               const std::vector<ConstraintDef>& defs);

// Exact ratio so percentages render without float drift.
struct Ratio {
  long long num = 0;
  long long den = 0;

  double fraction() const;
  // Percentage at one decimal, e.g. "34.4".
  std::string percent() const;
};

struct AggregateMetrics {
  Ratio delivery;
  Ratio cs_micro;
  Ratio cs_macro;
  Ratio hard_micro;
  Ratio hard_macro;
  Ratio final_pass;
};

AggregateMetrics aggregate(const std::vector<ConstraintReport>& reports);

}  // namespace tw
