#pragma once

#include <array>
#include <string>
#include <vector>

#include "tw/common.hpp"
#include "tw/kgraph.hpp"

namespace tw {

// One day is 15 slots: five script slots, five attraction visits, one commute
// mode, three meals, one accommodation. "0" marks an unused slot.
inline constexpr int kSlotsPerDay = 15;
inline constexpr const char* kEmptySlot = "0";

enum class Region {
  Script,
  Attraction,
  Commute,
  Breakfast,
  Lunch,
  Dinner,
  Accommodation,
};

inline constexpr std::array<Region, 7> kAllRegions = {
    Region::Script,    Region::Attraction, Region::Commute, Region::Breakfast,
    Region::Lunch,     Region::Dinner,     Region::Accommodation,
};

struct RegionSpan {
  int first;
  int count;
};

RegionSpan region_span(Region region);
std::string_view region_name(Region region);

// Candidate pools per region for one graph. Script candidates are scene ids,
// one per attraction, prefixed so the value domains never collide.
struct RegionLayout {
  std::vector<std::string> script_ids;
  std::vector<std::string> attraction_ids;
  std::vector<std::string> transport_ids;
  std::vector<std::string> restaurant_ids;
  std::vector<std::string> accommodation_ids;

  static RegionLayout from_graph(const KnowledgeGraph& graph);
  const std::vector<std::string>& candidates(Region region) const;
};

std::string script_id_for(const std::string& attraction_id);
std::string attraction_for_script_id(const std::string& script_id);

struct DayGenome {
  std::array<std::string, kSlotsPerDay> slots;
  DayGenome();
  bool operator==(const DayGenome&) const = default;
};

struct PlanGenome {
  std::vector<DayGenome> days;
  // Seed of the run that produced this genome; not part of identity.
  uint64_t rng_seed = 0;

  int day_count() const { return static_cast<int>(days.size()); }

  // One line per day, 15 comma-separated tokens.
  std::string serialize() const;
  static PlanGenome parse(std::string_view text);

  bool operator==(const PlanGenome& other) const { return days == other.days; }
};

// Seeds a population. Attraction slots draw without replacement across the
// whole plan, meal slots likewise per meal region; script and accommodation
// slots draw with replacement; each day gets a commute mode. A zeroing pass
// then empties attraction and meal slots with probability p_z each, keeping
// the commute rule intact.
std::vector<PlanGenome> init_population(const RegionLayout& layout, int days,
                                        int pop_num, double p_z, Rng& rng);

// Two-point crossover applied region by region: a window of b's slots
// replaces a's. A swap that would duplicate an attraction, meal, or per-day
// commute value is dropped for that region.
PlanGenome crossover(const PlanGenome& a, const PlanGenome& b,
                     const RegionLayout& layout, Rng& rng);

// Each region mutates one uniformly chosen slot with probability p_m, drawing
// a replacement that keeps the region's uniqueness rule.
PlanGenome mutate(const PlanGenome& genome, double p_m,
                  const RegionLayout& layout, Rng& rng);

struct DayPlan {
  std::vector<std::string> visits;
  std::string commute;
  std::string breakfast;
  std::string lunch;
  std::string dinner;
  std::string accommodation;
  std::vector<std::string> script_hints;
};

struct ItineraryPlan {
  std::vector<DayPlan> days;
  // All visits in day order; adjacent entries define the travel legs.
  std::vector<std::string> sequence;
};

// Drops empty slots and resolves ids against the graph. Throws
// ValidationError on a dangling id.
ItineraryPlan decode(const PlanGenome& genome, const KnowledgeGraph& graph);

}  // namespace tw
