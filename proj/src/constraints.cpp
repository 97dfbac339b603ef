#include "tw/constraints.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "json.hpp"

namespace tw {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> assigned_meals(const ItineraryPlan& plan) {
  std::vector<std::string> out;
  for (const DayPlan& day : plan.days) {
    for (const std::string* meal :
         {&day.breakfast, &day.lunch, &day.dinner}) {
      if (!meal->empty()) out.push_back(*meal);
    }
  }
  return out;
}

// Meal names a restaurant serves; no metadata means it serves all three.
bool serves_meal(const CatalogEntry& r, std::string_view meal) {
  auto it = r.metadata.find("meals");
  if (it == r.metadata.end()) return true;
  for (const std::string& part : split(it->second, ',')) {
    if (trim(part) == meal) return true;
  }
  return false;
}

bool check_within_sandbox(const ItineraryPlan& plan, const QueryParams&,
                          const KnowledgeGraph& graph) {
  for (const DayPlan& day : plan.days) {
    for (const std::string& v : day.visits) {
      if (!graph.has_node(v)) return false;
    }
    if (!day.commute.empty() && graph.transport_mode(day.commute) == nullptr) {
      return false;
    }
    for (const std::string* meal :
         {&day.breakfast, &day.lunch, &day.dinner}) {
      if (!meal->empty() && graph.restaurant(*meal) == nullptr) return false;
    }
    if (!day.accommodation.empty() &&
        graph.accommodation(day.accommodation) == nullptr) {
      return false;
    }
  }
  return true;
}

bool check_no_repeated_attractions(const ItineraryPlan& plan,
                                   const QueryParams&,
                                   const KnowledgeGraph&) {
  std::unordered_set<std::string> seen;
  for (const std::string& v : plan.sequence) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

bool check_no_repeated_restaurants(const ItineraryPlan& plan,
                                   const QueryParams&,
                                   const KnowledgeGraph&) {
  std::unordered_set<std::string> seen;
  for (const std::string& meal : assigned_meals(plan)) {
    if (!seen.insert(meal).second) return false;
  }
  return true;
}

bool check_complete_days(const ItineraryPlan& plan, const QueryParams&,
                         const KnowledgeGraph&) {
  for (const DayPlan& day : plan.days) {
    if (day.breakfast.empty() || day.lunch.empty() || day.dinner.empty() ||
        day.accommodation.empty()) {
      return false;
    }
  }
  return true;
}

bool check_meal_service(const ItineraryPlan& plan, const QueryParams&,
                        const KnowledgeGraph& graph) {
  for (const DayPlan& day : plan.days) {
    const std::pair<const std::string*, const char*> slots[] = {
        {&day.breakfast, "breakfast"},
        {&day.lunch, "lunch"},
        {&day.dinner, "dinner"},
    };
    for (const auto& [id, meal] : slots) {
      if (id->empty()) continue;
      const CatalogEntry* r = graph.restaurant(*id);
      if (r == nullptr) continue;  // sandbox check owns dangling ids
      if (!serves_meal(*r, meal)) return false;
    }
  }
  return true;
}

bool check_diverse_attractions(const ItineraryPlan& plan, const QueryParams&,
                               const KnowledgeGraph&) {
  std::unordered_set<std::string> distinct(plan.sequence.begin(),
                                           plan.sequence.end());
  return distinct.size() >= plan.days.size();
}

bool check_budget(const ItineraryPlan& plan, const QueryParams& params,
                  const KnowledgeGraph& graph) {
  if (!params.budget.has_value()) return true;
  return plan_cost(plan, params, graph) <= *params.budget;
}

bool check_room_type(const ItineraryPlan& plan, const QueryParams& params,
                     const KnowledgeGraph& graph) {
  if (!params.room_type.has_value()) return true;
  for (const DayPlan& day : plan.days) {
    if (day.accommodation.empty()) continue;
    const CatalogEntry* a = graph.accommodation(day.accommodation);
    if (a == nullptr) continue;
    auto it = a->metadata.find("room_type");
    if (it == a->metadata.end() || it->second != *params.room_type) {
      return false;
    }
  }
  return true;
}

bool check_cuisines(const ItineraryPlan& plan, const QueryParams& params,
                    const KnowledgeGraph& graph) {
  if (params.cuisines.empty()) return true;
  std::unordered_set<std::string> offered;
  for (const std::string& meal : assigned_meals(plan)) {
    const CatalogEntry* r = graph.restaurant(meal);
    if (r == nullptr) continue;
    auto it = r->metadata.find("cuisine");
    if (it != r->metadata.end()) offered.insert(it->second);
  }
  for (const std::string& wanted : params.cuisines) {
    if (offered.count(wanted) == 0) return false;
  }
  return true;
}

bool check_transport(const ItineraryPlan& plan, const QueryParams& params,
                     const KnowledgeGraph&) {
  for (const DayPlan& day : plan.days) {
    if (day.commute.empty()) continue;
    for (const std::string& banned : params.transport_exclude) {
      if (day.commute == banned) return false;
    }
  }
  return true;
}

}  // namespace

std::string_view constraint_category_name(ConstraintCategory category) {
  return category == ConstraintCategory::Commonsense ? "commonsense" : "hard";
}

QueryParams QueryParams::from_json_text(std::string_view text,
                                        const std::string& origin_name) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(origin_name + ": invalid query JSON: " + e.what());
  }
  QueryParams q;
  try {
    q.name = j.value("name", "");
    q.origin = j.value("origin", "");
    q.destination = j.value("destination", "");
    q.days = j.value("days", 1);
    if (j.contains("budget") && !j.at("budget").is_null()) {
      q.budget = j.at("budget").get<double>();
    }
    q.party_size = j.value("party_size", 1);
    if (j.contains("room_type") && !j.at("room_type").is_null()) {
      q.room_type = j.at("room_type").get<std::string>();
    }
    for (const auto& c : j.value("cuisines", ordered_json::array())) {
      q.cuisines.push_back(c.get<std::string>());
    }
    for (const auto& t :
         j.value("transport_exclude", ordered_json::array())) {
      q.transport_exclude.push_back(t.get<std::string>());
    }
    q.note = j.value("note", "");
  } catch (const ordered_json::exception& e) {
    throw ParseError(origin_name + ": malformed query: " + e.what());
  }
  if (q.days < 1) throw ValidationError(origin_name + ": days must be >= 1");
  if (q.party_size < 1) {
    throw ValidationError(origin_name + ": party_size must be >= 1");
  }
  if (q.budget.has_value() && *q.budget < 0.0) {
    throw ValidationError(origin_name + ": budget must be >= 0");
  }
  return q;
}

std::string QueryParams::to_json_text() const {
  ordered_json j;
  j["name"] = name;
  j["origin"] = origin;
  j["destination"] = destination;
  j["days"] = days;
  if (budget.has_value()) {
    j["budget"] = *budget;
  } else {
    j["budget"] = nullptr;
  }
  j["party_size"] = party_size;
  if (room_type.has_value()) {
    j["room_type"] = *room_type;
  } else {
    j["room_type"] = nullptr;
  }
  j["cuisines"] = cuisines;
  j["transport_exclude"] = transport_exclude;
  j["note"] = note;
  return j.dump(2) + "\n";
}

std::vector<QueryParams> load_queries(const std::string& path) {
  ordered_json root;
  try {
    root = ordered_json::parse(read_text_file(path));
  } catch (const std::exception& e) {
    throw ParseError(path + ": invalid queries JSON: " + e.what());
  }
  const ordered_json* arr = &root;
  if (root.is_object()) {
    if (!root.contains("queries")) {
      throw ParseError(path + ": expected an array or a \"queries\" field");
    }
    arr = &root.at("queries");
  }
  if (!arr->is_array() || arr->empty()) {
    throw ParseError(path + ": queries must be a nonempty array");
  }
  std::vector<QueryParams> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    out.push_back(QueryParams::from_json_text(
        (*arr)[i].dump(), path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<ConstraintDef> builtin_constraint_set() {
  std::vector<ConstraintDef> defs;
  defs.push_back({"within_sandbox", ConstraintCategory::Commonsense,
                  "every referenced id exists in the graph",
                  check_within_sandbox});
  defs.push_back({"no_repeated_attractions", ConstraintCategory::Commonsense,
                  "no attraction is visited twice",
                  check_no_repeated_attractions});
  defs.push_back({"no_repeated_restaurants", ConstraintCategory::Commonsense,
                  "no restaurant is booked twice",
                  check_no_repeated_restaurants});
  defs.push_back({"complete_days", ConstraintCategory::Commonsense,
                  "every day has three meals and a place to sleep",
                  check_complete_days});
  defs.push_back({"meal_service", ConstraintCategory::Commonsense,
                  "assigned restaurants serve the meal slot they fill",
                  check_meal_service});
  defs.push_back({"diverse_attractions", ConstraintCategory::Commonsense,
                  "distinct attractions count at least matches the day count",
                  check_diverse_attractions});
  defs.push_back({"budget", ConstraintCategory::Hard,
                  "party cost stays within the stated budget", check_budget});
  defs.push_back({"room_type", ConstraintCategory::Hard,
                  "every booked room matches the requested type",
                  check_room_type});
  defs.push_back({"cuisines", ConstraintCategory::Hard,
                  "every requested cuisine appears in some booked meal",
                  check_cuisines});
  defs.push_back({"transport", ConstraintCategory::Hard,
                  "no excluded transport mode is used", check_transport});
  return defs;
}

std::vector<ConstraintDef> filter_constraints(
    std::vector<ConstraintDef> defs, const std::vector<std::string>& disabled) {
  for (const std::string& id : disabled) {
    bool known = std::any_of(defs.begin(), defs.end(),
                             [&](const ConstraintDef& d) { return d.id == id; });
    if (!known) throw ConfigError("unknown constraint id: " + id);
  }
  std::vector<ConstraintDef> out;
  for (ConstraintDef& d : defs) {
    if (std::find(disabled.begin(), disabled.end(), d.id) == disabled.end()) {
      out.push_back(std::move(d));
    }
  }
  return out;
}

double plan_cost(const ItineraryPlan& plan, const QueryParams& params,
                 const KnowledgeGraph& graph) {
  double per_person = 0.0;
  for (const DayPlan& day : plan.days) {
    for (const std::string& v : day.visits) {
      if (graph.has_node(v)) per_person += graph.node(v).ticket_price;
    }
    for (const std::string* meal :
         {&day.breakfast, &day.lunch, &day.dinner}) {
      if (meal->empty()) continue;
      if (const CatalogEntry* r = graph.restaurant(*meal)) {
        per_person += r->price;
      }
    }
    if (!day.accommodation.empty()) {
      if (const CatalogEntry* a = graph.accommodation(day.accommodation)) {
        per_person += a->price;
      }
    }
  }
  return per_person * static_cast<double>(params.party_size);
}

int ConstraintReport::passed_count(ConstraintCategory category) const {
  int count = 0;
  for (const ConstraintResult& r : results) {
    if (r.category == category && r.passed) ++count;
  }
  return count;
}

int ConstraintReport::total_count(ConstraintCategory category) const {
  int count = 0;
  for (const ConstraintResult& r : results) {
    if (r.category == category) ++count;
  }
  return count;
}

bool ConstraintReport::all_passed(ConstraintCategory category) const {
  if (!delivered) return false;
  return passed_count(category) == total_count(category);
}

bool ConstraintReport::all_passed() const {
  return all_passed(ConstraintCategory::Commonsense) &&
         all_passed(ConstraintCategory::Hard);
}

ConstraintReport ConstraintReport::undelivered(
    const std::vector<ConstraintDef>& defs) {
  ConstraintReport report;
  report.delivered = false;
  for (const ConstraintDef& d : defs) {
    report.results.push_back({d.id, d.category, false});
  }
  return report;
}

ConstraintReport evaluate_plan(const ItineraryPlan& plan,
                               const QueryParams& params,
                               const KnowledgeGraph& graph,
                               const std::vector<ConstraintDef>& defs) {
  ConstraintReport report;
  report.delivered = true;
  for (const ConstraintDef& d : defs) {
    bool ok = d.check(plan, params, graph);
    report.results.push_back({d.id, d.category, ok});
  }
  return report;
}

double Ratio::fraction() const {
  if (den == 0) return 1.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Ratio::percent() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction() * 100.0);
  return std::string(buf);
}

AggregateMetrics aggregate(const std::vector<ConstraintReport>& reports) {
  if (reports.empty()) {
    throw ValidationError("aggregate needs at least one report");
  }
  AggregateMetrics m;
  long long n = static_cast<long long>(reports.size());
  m.delivery.den = n;
  m.cs_macro.den = n;
  m.hard_macro.den = n;
  m.final_pass.den = n;
  for (const ConstraintReport& r : reports) {
    if (r.delivered) ++m.delivery.num;
    m.cs_micro.num += r.passed_count(ConstraintCategory::Commonsense);
    m.cs_micro.den += r.total_count(ConstraintCategory::Commonsense);
    m.hard_micro.num += r.passed_count(ConstraintCategory::Hard);
    m.hard_micro.den += r.total_count(ConstraintCategory::Hard);
    if (r.all_passed(ConstraintCategory::Commonsense)) ++m.cs_macro.num;
    if (r.all_passed(ConstraintCategory::Hard)) ++m.hard_macro.num;
    if (r.all_passed()) ++m.final_pass.num;
  }
  return m;
}

}  // namespace tw
