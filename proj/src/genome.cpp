#include "tw/genome.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace tw {

namespace {

constexpr std::string_view kScriptPrefix = "s_";

int day_visit_count(const DayGenome& day) {
  RegionSpan span = region_span(Region::Attraction);
  int count = 0;
  for (int i = 0; i < span.count; ++i) {
    if (day.slots[static_cast<std::size_t>(span.first + i)] != kEmptySlot) {
      ++count;
    }
  }
  return count;
}

bool is_meal_region(Region region) {
  return region == Region::Breakfast || region == Region::Lunch ||
         region == Region::Dinner;
}

// All non-empty values across the three meal regions, minus one excluded
// slot position.
std::vector<std::string> meal_values_except(const PlanGenome& genome,
                                            int skip_day, int skip_slot) {
  std::vector<std::string> values;
  for (int d = 0; d < genome.day_count(); ++d) {
    for (Region region :
         {Region::Breakfast, Region::Lunch, Region::Dinner}) {
      RegionSpan span = region_span(region);
      for (int i = 0; i < span.count; ++i) {
        int slot = span.first + i;
        if (d == skip_day && slot == skip_slot) continue;
        const std::string& v =
            genome.days[static_cast<std::size_t>(d)].slots[static_cast<std::size_t>(slot)];
        if (v != kEmptySlot) values.push_back(v);
      }
    }
  }
  return values;
}

std::vector<std::string> attraction_values_except(const PlanGenome& genome,
                                                  int skip_day, int skip_slot) {
  std::vector<std::string> values;
  RegionSpan span = region_span(Region::Attraction);
  for (int d = 0; d < genome.day_count(); ++d) {
    for (int i = 0; i < span.count; ++i) {
      int slot = span.first + i;
      if (d == skip_day && slot == skip_slot) continue;
      const std::string& v =
          genome.days[static_cast<std::size_t>(d)].slots[static_cast<std::size_t>(slot)];
      if (v != kEmptySlot) values.push_back(v);
    }
  }
  return values;
}

bool has_duplicates(const std::vector<std::string>& values) {
  std::unordered_set<std::string> seen;
  for (const std::string& v : values) {
    if (!seen.insert(v).second) return true;
  }
  return false;
}

// Region slot in day-major order: position p covers day p/count, slot
// span.first + p%count.
std::string& region_slot(PlanGenome& genome, Region region, int position) {
  RegionSpan span = region_span(region);
  int day = position / span.count;
  int offset = position % span.count;
  return genome.days[static_cast<std::size_t>(day)]
      .slots[static_cast<std::size_t>(span.first + offset)];
}

const std::string& region_slot(const PlanGenome& genome, Region region,
                               int position) {
  return region_slot(const_cast<PlanGenome&>(genome), region, position);
}

// Days with at least two visits must carry a commute mode.
void repair_commutes(PlanGenome& genome, const RegionLayout& layout, Rng& rng) {
  int commute_slot = region_span(Region::Commute).first;
  for (DayGenome& day : genome.days) {
    if (day_visit_count(day) >= 2 &&
        day.slots[static_cast<std::size_t>(commute_slot)] == kEmptySlot) {
      day.slots[static_cast<std::size_t>(commute_slot)] =
          rng.pick(layout.transport_ids);
    }
  }
}

void require_pool(std::size_t have, std::size_t need, std::string_view region) {
  if (have < need) {
    throw ConfigError(std::string(region) + " candidate pool has " +
                      std::to_string(have) + " entries but the plan needs " +
                      std::to_string(need));
  }
}

}  // namespace

RegionSpan region_span(Region region) {
  switch (region) {
    case Region::Script: return {0, 5};
    case Region::Attraction: return {5, 5};
    case Region::Commute: return {10, 1};
    case Region::Breakfast: return {11, 1};
    case Region::Lunch: return {12, 1};
    case Region::Dinner: return {13, 1};
    case Region::Accommodation: return {14, 1};
  }
  throw ConfigError("unknown region");
}

std::string_view region_name(Region region) {
  switch (region) {
    case Region::Script: return "script";
    case Region::Attraction: return "attraction";
    case Region::Commute: return "commute";
    case Region::Breakfast: return "breakfast";
    case Region::Lunch: return "lunch";
    case Region::Dinner: return "dinner";
    case Region::Accommodation: return "accommodation";
  }
  throw ConfigError("unknown region");
}

std::string script_id_for(const std::string& attraction_id) {
  return std::string(kScriptPrefix) + attraction_id;
}

std::string attraction_for_script_id(const std::string& script_id) {
  if (script_id.size() <= kScriptPrefix.size() ||
      script_id.substr(0, kScriptPrefix.size()) != kScriptPrefix) {
    throw ValidationError("not a script candidate id: " + script_id);
  }
  return script_id.substr(kScriptPrefix.size());
}

RegionLayout RegionLayout::from_graph(const KnowledgeGraph& graph) {
  RegionLayout layout;
  std::unordered_set<std::string> taken;
  for (const AttractionNode& n : graph.nodes()) taken.insert(n.id);
  for (const CatalogEntry& e : graph.restaurants()) taken.insert(e.id);
  for (const CatalogEntry& e : graph.accommodations()) taken.insert(e.id);
  for (const CatalogEntry& e : graph.transport_modes()) taken.insert(e.id);
  for (const AttractionNode& n : graph.nodes()) {
    std::string sid = script_id_for(n.id);
    if (taken.count(sid) != 0) {
      throw ValidationError("script candidate id collides with graph id: " +
                            sid);
    }
    layout.script_ids.push_back(std::move(sid));
    layout.attraction_ids.push_back(n.id);
  }
  for (const CatalogEntry& e : graph.transport_modes()) {
    layout.transport_ids.push_back(e.id);
  }
  for (const CatalogEntry& e : graph.restaurants()) {
    layout.restaurant_ids.push_back(e.id);
  }
  for (const CatalogEntry& e : graph.accommodations()) {
    layout.accommodation_ids.push_back(e.id);
  }
  return layout;
}

const std::vector<std::string>& RegionLayout::candidates(Region region) const {
  switch (region) {
    case Region::Script: return script_ids;
    case Region::Attraction: return attraction_ids;
    case Region::Commute: return transport_ids;
    case Region::Breakfast:
    case Region::Lunch:
    case Region::Dinner: return restaurant_ids;
    case Region::Accommodation: return accommodation_ids;
  }
  throw ConfigError("unknown region");
}

DayGenome::DayGenome() {
  for (std::string& s : slots) s = kEmptySlot;
}

std::string PlanGenome::serialize() const {
  std::string out;
  for (const DayGenome& day : days) {
    for (int i = 0; i < kSlotsPerDay; ++i) {
      if (i > 0) out += ',';
      out += day.slots[static_cast<std::size_t>(i)];
    }
    out += '\n';
  }
  return out;
}

PlanGenome PlanGenome::parse(std::string_view text) {
  PlanGenome genome;
  std::vector<std::string> lines = split(text, '\n');
  int line_no = 0;
  for (const std::string& line : lines) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> tokens = split(line, ',');
    if (tokens.size() != kSlotsPerDay) {
      throw ParseError("genome line " + std::to_string(line_no) +
                       ": expected " + std::to_string(kSlotsPerDay) +
                       " slots, got " + std::to_string(tokens.size()));
    }
    DayGenome day;
    for (int i = 0; i < kSlotsPerDay; ++i) {
      std::string token = trim(tokens[static_cast<std::size_t>(i)]);
      if (token.empty()) {
        throw ParseError("genome line " + std::to_string(line_no) + ": slot " +
                         std::to_string(i + 1) + " is blank");
      }
      day.slots[static_cast<std::size_t>(i)] = std::move(token);
    }
    genome.days.push_back(std::move(day));
  }
  if (genome.days.empty()) {
    throw ParseError("genome text holds no days");
  }
  return genome;
}

std::vector<PlanGenome> init_population(const RegionLayout& layout, int days,
                                        int pop_num, double p_z, Rng& rng) {
  if (days < 1) throw ConfigError("plan needs at least one day");
  if (pop_num < 1) throw ConfigError("population needs at least one member");
  if (p_z < 0.0 || p_z > 1.0) {
    throw ConfigError("zeroing probability must lie in [0,1]");
  }
  std::size_t d = static_cast<std::size_t>(days);
  require_pool(layout.script_ids.size(), 1, "script");
  require_pool(layout.attraction_ids.size(), 5 * d, "attraction");
  require_pool(layout.restaurant_ids.size(), 3 * d, "restaurant");
  require_pool(layout.transport_ids.size(), 1, "transport");
  require_pool(layout.accommodation_ids.size(), 1, "accommodation");

  std::vector<PlanGenome> population;
  population.reserve(static_cast<std::size_t>(pop_num));
  for (int p = 0; p < pop_num; ++p) {
    PlanGenome genome;
    genome.days.resize(d);

    std::vector<std::size_t> visit_draw =
        rng.sample_indices(layout.attraction_ids.size(), 5 * d);
    std::vector<std::size_t> meal_draw =
        rng.sample_indices(layout.restaurant_ids.size(), 3 * d);
    for (std::size_t i = 0; i < 5 * d; ++i) {
      region_slot(genome, Region::Attraction, static_cast<int>(i)) =
          layout.attraction_ids[visit_draw[i]];
    }
    std::size_t meal_pos = 0;
    for (std::size_t day = 0; day < d; ++day) {
      for (Region region :
           {Region::Breakfast, Region::Lunch, Region::Dinner}) {
        region_slot(genome, region, static_cast<int>(day)) =
            layout.restaurant_ids[meal_draw[meal_pos++]];
      }
    }
    for (std::size_t i = 0; i < 5 * d; ++i) {
      region_slot(genome, Region::Script, static_cast<int>(i)) =
          rng.pick(layout.script_ids);
    }
    for (std::size_t day = 0; day < d; ++day) {
      region_slot(genome, Region::Accommodation, static_cast<int>(day)) =
          rng.pick(layout.accommodation_ids);
    }
    for (std::size_t day = 0; day < d; ++day) {
      region_slot(genome, Region::Commute, static_cast<int>(day)) =
          rng.pick(layout.transport_ids);
    }

    // Zeroing pass in slot order. The commute slot may only empty out when
    // the day keeps at most one visit.
    for (DayGenome& day : genome.days) {
      RegionSpan visits = region_span(Region::Attraction);
      for (int i = 0; i < visits.count; ++i) {
        if (rng.chance(p_z)) {
          day.slots[static_cast<std::size_t>(visits.first + i)] = kEmptySlot;
        }
      }
      int commute_slot = region_span(Region::Commute).first;
      if (day_visit_count(day) <= 1 && rng.chance(p_z)) {
        day.slots[static_cast<std::size_t>(commute_slot)] = kEmptySlot;
      }
      for (Region region :
           {Region::Breakfast, Region::Lunch, Region::Dinner}) {
        int slot = region_span(region).first;
        if (rng.chance(p_z)) {
          day.slots[static_cast<std::size_t>(slot)] = kEmptySlot;
        }
      }
    }
    population.push_back(std::move(genome));
  }
  return population;
}

PlanGenome crossover(const PlanGenome& a, const PlanGenome& b,
                     const RegionLayout& layout, Rng& rng) {
  if (a.day_count() != b.day_count()) {
    throw ValidationError("crossover parents span different day counts: " +
                          std::to_string(a.day_count()) + " vs " +
                          std::to_string(b.day_count()));
  }
  PlanGenome child = a;
  int d = a.day_count();
  for (Region region : kAllRegions) {
    int length = region_span(region).count * d;
    int n1 = static_cast<int>(rng.index(static_cast<std::size_t>(length) + 1));
    int n2 = static_cast<int>(rng.index(static_cast<std::size_t>(length) + 1));
    if (n1 > n2) std::swap(n1, n2);
    if (n1 == n2) continue;

    std::vector<std::string> saved;
    saved.reserve(static_cast<std::size_t>(n2 - n1));
    for (int p = n1; p < n2; ++p) {
      saved.push_back(region_slot(child, region, p));
      region_slot(child, region, p) = region_slot(b, region, p);
    }

    bool conflict = false;
    if (region == Region::Attraction) {
      conflict = has_duplicates(attraction_values_except(child, -1, -1));
    } else if (is_meal_region(region)) {
      conflict = has_duplicates(meal_values_except(child, -1, -1));
    }
    if (conflict) {
      for (int p = n1; p < n2; ++p) {
        region_slot(child, region, p) =
            std::move(saved[static_cast<std::size_t>(p - n1)]);
      }
    }
  }
  repair_commutes(child, layout, rng);
  return child;
}

PlanGenome mutate(const PlanGenome& genome, double p_m,
                  const RegionLayout& layout, Rng& rng) {
  if (p_m < 0.0 || p_m > 1.0) {
    throw ConfigError("mutation probability must lie in [0,1]");
  }
  PlanGenome child = genome;
  int d = child.day_count();
  for (Region region : kAllRegions) {
    if (!rng.chance(p_m)) continue;
    RegionSpan span = region_span(region);
    int length = span.count * d;
    int position = static_cast<int>(rng.index(static_cast<std::size_t>(length)));
    int day = position / span.count;
    int slot = span.first + position % span.count;

    std::vector<std::string> pool;
    if (region == Region::Script) {
      pool = layout.script_ids;
    } else if (region == Region::Accommodation) {
      pool = layout.accommodation_ids;
    } else if (region == Region::Attraction) {
      std::vector<std::string> used = attraction_values_except(child, day, slot);
      std::unordered_set<std::string> used_set(used.begin(), used.end());
      for (const std::string& c : layout.attraction_ids) {
        if (used_set.count(c) == 0) pool.push_back(c);
      }
      pool.push_back(kEmptySlot);
    } else if (is_meal_region(region)) {
      std::vector<std::string> used = meal_values_except(child, day, slot);
      std::unordered_set<std::string> used_set(used.begin(), used.end());
      for (const std::string& c : layout.restaurant_ids) {
        if (used_set.count(c) == 0) pool.push_back(c);
      }
      pool.push_back(kEmptySlot);
    } else {
      pool = layout.transport_ids;
      if (day_visit_count(child.days[static_cast<std::size_t>(day)]) <= 1) {
        pool.push_back(kEmptySlot);
      }
    }
    child.days[static_cast<std::size_t>(day)]
        .slots[static_cast<std::size_t>(slot)] = rng.pick(pool);
  }
  repair_commutes(child, layout, rng);
  return child;
}

ItineraryPlan decode(const PlanGenome& genome, const KnowledgeGraph& graph) {
  ItineraryPlan plan;
  for (const DayGenome& day : genome.days) {
    DayPlan dp;
    RegionSpan scripts = region_span(Region::Script);
    for (int i = 0; i < scripts.count; ++i) {
      const std::string& v =
          day.slots[static_cast<std::size_t>(scripts.first + i)];
      if (v == kEmptySlot) continue;
      std::string id = attraction_for_script_id(v);
      if (!graph.has_node(id)) {
        throw ValidationError("script slot references unknown attraction: " +
                              v);
      }
      dp.script_hints.push_back(std::move(id));
    }
    RegionSpan visits = region_span(Region::Attraction);
    for (int i = 0; i < visits.count; ++i) {
      const std::string& v =
          day.slots[static_cast<std::size_t>(visits.first + i)];
      if (v == kEmptySlot) continue;
      if (!graph.has_node(v)) {
        throw ValidationError("attraction slot references unknown id: " + v);
      }
      dp.visits.push_back(v);
      plan.sequence.push_back(v);
    }
    auto take = [&](Region region, std::string DayPlan::*field,
                    auto resolver, const char* domain) {
      const std::string& v =
          day.slots[static_cast<std::size_t>(region_span(region).first)];
      if (v == kEmptySlot) return;
      if ((graph.*resolver)(v) == nullptr) {
        throw ValidationError(std::string(domain) +
                              " slot references unknown id: " + v);
      }
      dp.*field = v;
    };
    take(Region::Commute, &DayPlan::commute, &KnowledgeGraph::transport_mode,
         "commute");
    take(Region::Breakfast, &DayPlan::breakfast, &KnowledgeGraph::restaurant,
         "breakfast");
    take(Region::Lunch, &DayPlan::lunch, &KnowledgeGraph::restaurant, "lunch");
    take(Region::Dinner, &DayPlan::dinner, &KnowledgeGraph::restaurant,
         "dinner");
    take(Region::Accommodation, &DayPlan::accommodation,
         &KnowledgeGraph::accommodation, "accommodation");
    plan.days.push_back(std::move(dp));
  }
  return plan;
}

}  // namespace tw
