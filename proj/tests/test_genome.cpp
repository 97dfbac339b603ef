#include <algorithm>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "tw/common.hpp"
#include "tw/genome.hpp"
#include "tw/kgraph.hpp"

using namespace tw;

namespace {

const std::string kGraphPath =
    std::string(TW_FIXTURES_DIR) + "/toycity/graph.json";

KnowledgeGraph fixture_graph() { return KnowledgeGraph::load(kGraphPath); }

int day_visits(const DayGenome& day) {
  RegionSpan span = region_span(Region::Attraction);
  int n = 0;
  for (int i = 0; i < span.count; ++i) {
    if (day.slots[static_cast<std::size_t>(span.first + i)] != kEmptySlot) ++n;
  }
  return n;
}

bool in_pool(const std::vector<std::string>& pool, const std::string& v) {
  return std::find(pool.begin(), pool.end(), v) != pool.end();
}

// Full invariant scan; returns a description of the first violation.
std::string genome_violation(const PlanGenome& g, const RegionLayout& layout,
                             int expected_days) {
  if (g.day_count() != expected_days) return "wrong day count";
  std::unordered_set<std::string> attractions;
  std::unordered_set<std::string> meals;
  for (const DayGenome& day : g.days) {
    for (Region region : kAllRegions) {
      RegionSpan span = region_span(region);
      for (int i = 0; i < span.count; ++i) {
        const std::string& v =
            day.slots[static_cast<std::size_t>(span.first + i)];
        if (v.empty()) return "blank slot";
        if (v == kEmptySlot) {
          if (region == Region::Script) return "zero script slot";
          if (region == Region::Accommodation) return "zero accommodation";
          continue;
        }
        if (!in_pool(layout.candidates(region), v)) {
          return "foreign value " + v + " in " + std::string(region_name(region));
        }
        if (region == Region::Attraction && !attractions.insert(v).second) {
          return "duplicate attraction " + v;
        }
        if ((region == Region::Breakfast || region == Region::Lunch ||
             region == Region::Dinner) &&
            !meals.insert(v).second) {
          return "duplicate restaurant " + v;
        }
      }
    }
    int commute_slot = region_span(Region::Commute).first;
    if (day_visits(day) >= 2 &&
        day.slots[static_cast<std::size_t>(commute_slot)] == kEmptySlot) {
      return "multi-visit day without commute";
    }
  }
  return "";
}

std::vector<std::string> attraction_row(const PlanGenome& g, int day) {
  RegionSpan span = region_span(Region::Attraction);
  std::vector<std::string> row;
  for (int i = 0; i < span.count; ++i) {
    row.push_back(
        g.days[static_cast<std::size_t>(day)].slots[static_cast<std::size_t>(span.first + i)]);
  }
  return row;
}

void set_attraction_row(PlanGenome& g, int day,
                        const std::vector<std::string>& row) {
  RegionSpan span = region_span(Region::Attraction);
  for (int i = 0; i < span.count; ++i) {
    g.days[static_cast<std::size_t>(day)].slots[static_cast<std::size_t>(span.first + i)] =
        row[static_cast<std::size_t>(i)];
  }
}

// Minimal valid one-day genome over the given layout, no visits.
PlanGenome blank_day(const RegionLayout& layout) {
  PlanGenome g;
  g.days.resize(1);
  DayGenome& day = g.days[0];
  for (int i = 0; i < kSlotsPerDay; ++i) day.slots[static_cast<std::size_t>(i)] = kEmptySlot;
  RegionSpan scripts = region_span(Region::Script);
  for (int i = 0; i < scripts.count; ++i) {
    day.slots[static_cast<std::size_t>(scripts.first + i)] = layout.script_ids[0];
  }
  day.slots[static_cast<std::size_t>(region_span(Region::Accommodation).first)] =
      layout.accommodation_ids[0];
  return g;
}

RegionLayout tiny_layout() {
  RegionLayout layout;
  layout.script_ids = {"s_a", "s_b", "s_c"};
  layout.attraction_ids = {"A", "B", "C"};
  layout.transport_ids = {"walk", "tram"};
  layout.restaurant_ids = {"r1", "r2", "r3", "r4"};
  layout.accommodation_ids = {"h1", "h2"};
  return layout;
}

}  // namespace

TEST_CASE("region spans partition the fifteen slots in order") {
  int next = 0;
  for (Region region : kAllRegions) {
    RegionSpan span = region_span(region);
    CHECK(span.first == next);
    CHECK(span.count > 0);
    next += span.count;
  }
  CHECK(next == kSlotsPerDay);
  CHECK(region_span(Region::Script).count == 5);
  CHECK(region_span(Region::Attraction).first == 5);
  CHECK(region_span(Region::Commute).first == 10);
  CHECK(region_span(Region::Breakfast).first == 11);
  CHECK(region_span(Region::Lunch).first == 12);
  CHECK(region_span(Region::Dinner).first == 13);
  CHECK(region_span(Region::Accommodation).first == 14);
}

TEST_CASE("the graph layout carries disjoint candidate domains") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  CHECK(layout.attraction_ids.size() == 12);
  CHECK(layout.script_ids.size() == 12);
  CHECK(layout.restaurant_ids.size() == 10);
  CHECK(layout.accommodation_ids.size() == 4);
  CHECK(layout.transport_ids.size() == 4);

  std::set<std::string> all;
  std::size_t total = 0;
  for (const auto* pool :
       {&layout.script_ids, &layout.attraction_ids, &layout.transport_ids,
        &layout.restaurant_ids, &layout.accommodation_ids}) {
    all.insert(pool->begin(), pool->end());
    total += pool->size();
  }
  CHECK(all.size() == total);
  CHECK(all.count(kEmptySlot) == 0);

  CHECK(&layout.candidates(Region::Script) == &layout.script_ids);
  CHECK(&layout.candidates(Region::Attraction) == &layout.attraction_ids);
  CHECK(&layout.candidates(Region::Commute) == &layout.transport_ids);
  CHECK(&layout.candidates(Region::Breakfast) == &layout.restaurant_ids);
  CHECK(&layout.candidates(Region::Lunch) == &layout.restaurant_ids);
  CHECK(&layout.candidates(Region::Dinner) == &layout.restaurant_ids);
  CHECK(&layout.candidates(Region::Accommodation) == &layout.accommodation_ids);
}

TEST_CASE("script ids map back to their attraction") {
  CHECK(script_id_for("old_harbor") == "s_old_harbor");
  CHECK(attraction_for_script_id("s_old_harbor") == "old_harbor");
  CHECK_THROWS_WITH_AS(attraction_for_script_id("old_harbor"),
                       doctest::Contains("not a script candidate id"),
                       ValidationError);
}

TEST_CASE("initialization satisfies every genome invariant") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(42);
  std::vector<PlanGenome> pop = init_population(layout, 2, 20, 0.3, rng);
  REQUIRE(pop.size() == 20);
  for (const PlanGenome& genome : pop) {
    CHECK(genome_violation(genome, layout, 2).empty());
  }
}

TEST_CASE("zeroing probability one empties slots six through fourteen") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(7);
  for (const PlanGenome& genome : init_population(layout, 2, 10, 1.0, rng)) {
    for (const DayGenome& day : genome.days) {
      for (int slot = region_span(Region::Attraction).first;
           slot <= region_span(Region::Dinner).first; ++slot) {
        CHECK(day.slots[static_cast<std::size_t>(slot)] == kEmptySlot);
      }
      for (int i = 0; i < 5; ++i) {
        CHECK(day.slots[static_cast<std::size_t>(i)] != kEmptySlot);
      }
      CHECK(day.slots[14] != kEmptySlot);
    }
  }
}

TEST_CASE("zeroing probability zero fills a five-attraction day completely") {
  RegionLayout layout = tiny_layout();
  layout.attraction_ids = {"A", "B", "C", "D", "E"};
  Rng rng(11);
  std::vector<PlanGenome> pop = init_population(layout, 1, 8, 0.0, rng);
  for (const PlanGenome& genome : pop) {
    std::vector<std::string> row = attraction_row(genome, 0);
    std::vector<std::string> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::string>{"A", "B", "C", "D", "E"});
    CHECK(genome.days[0].slots[10] != kEmptySlot);
  }
}

TEST_CASE("initialization names the region whose pool is too small") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(3);
  CHECK_THROWS_WITH_AS(
      init_population(layout, 3, 4, 0.3, rng),
      doctest::Contains(
          "attraction candidate pool has 12 entries but the plan needs 15"),
      ConfigError);

  RegionLayout starved = layout;
  starved.restaurant_ids = {"r1", "r2"};
  CHECK_THROWS_WITH_AS(init_population(starved, 1, 4, 0.3, rng),
                       doctest::Contains("restaurant candidate pool has 2"),
                       ConfigError);

  RegionLayout no_transport = layout;
  no_transport.transport_ids.clear();
  CHECK_THROWS_WITH_AS(init_population(no_transport, 1, 4, 0.3, rng),
                       doctest::Contains("transport candidate pool has 0"),
                       ConfigError);

  CHECK_THROWS_WITH_AS(init_population(layout, 0, 4, 0.3, rng),
                       doctest::Contains("at least one day"), ConfigError);
  CHECK_THROWS_WITH_AS(init_population(layout, 1, 4, 1.5, rng),
                       doctest::Contains("must lie in [0,1]"), ConfigError);
}

TEST_CASE("serialization round-trips and reports malformed lines") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(13);
  PlanGenome genome = init_population(layout, 2, 1, 0.3, rng)[0];

  std::string text = genome.serialize();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  PlanGenome back = PlanGenome::parse(text);
  CHECK(back == genome);

  CHECK_THROWS_WITH_AS(PlanGenome::parse("1,2,3"),
                       doctest::Contains("expected 15 slots, got 3"),
                       ParseError);
  CHECK_THROWS_WITH_AS(PlanGenome::parse("a,b,c,d,e,f,g,h,i,j,k,l,m,n,,"),
                       doctest::Contains("got 16"), ParseError);
  CHECK_THROWS_WITH_AS(
      PlanGenome::parse("a,b,c,d,e,,g,h,i,j,k,l,m,n,o"),
      doctest::Contains("slot 6 is blank"), ParseError);
  CHECK_THROWS_WITH_AS(PlanGenome::parse("\n\n"),
                       doctest::Contains("holds no days"), ParseError);
}

TEST_CASE("self-crossover is the identity") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(17);
  PlanGenome a = init_population(layout, 2, 1, 0.3, rng)[0];
  for (int i = 0; i < 20; ++i) {
    CHECK(crossover(a, a, layout, rng) == a);
  }
}

TEST_CASE("crossover rejects parents with different day counts") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(19);
  PlanGenome a = init_population(layout, 1, 1, 0.5, rng)[0];
  PlanGenome b = init_population(layout, 2, 1, 0.5, rng)[0];
  CHECK_THROWS_WITH_AS(crossover(a, b, layout, rng),
                       doctest::Contains("different day counts: 1 vs 2"),
                       ValidationError);
}

TEST_CASE("attraction windows that would duplicate a value abort the swap") {
  RegionLayout layout = tiny_layout();
  layout.attraction_ids = {"A", "B", "C", "D", "E"};
  PlanGenome a = blank_day(layout);
  set_attraction_row(a, 0, {"A", "B", "C", "0", "0"});
  a.days[0].slots[10] = "walk";
  PlanGenome b = blank_day(layout);
  set_attraction_row(b, 0, {"C", "D", "E", "0", "0"});
  b.days[0].slots[10] = "walk";

  Rng rng(23);
  bool saw_abort = false;
  bool saw_swap = false;
  for (int i = 0; i < 500; ++i) {
    PlanGenome child = crossover(a, b, layout, rng);
    CHECK(genome_violation(child, layout, 1).empty());
    std::vector<std::string> row = attraction_row(child, 0);
    if (row == attraction_row(a, 0)) saw_abort = true;
    if (in_pool(row, "D")) saw_swap = true;
    // Every value must come from one of the parents.
    for (const std::string& v : row) {
      CHECK((v == kEmptySlot || in_pool(attraction_row(a, 0), v) ||
             in_pool(attraction_row(b, 0), v)));
    }
  }
  CHECK(saw_abort);
  CHECK(saw_swap);
}

TEST_CASE("script windows swap freely even when values repeat") {
  RegionLayout layout = tiny_layout();
  PlanGenome a = blank_day(layout);
  PlanGenome b = blank_day(layout);
  for (int i = 0; i < 5; ++i) {
    a.days[0].slots[static_cast<std::size_t>(i)] = "s_a";
    b.days[0].slots[static_cast<std::size_t>(i)] = "s_b";
  }
  Rng rng(29);
  bool saw_mixed = false;
  for (int i = 0; i < 200; ++i) {
    PlanGenome child = crossover(a, b, layout, rng);
    std::vector<std::string> scripts(child.days[0].slots.begin(),
                                     child.days[0].slots.begin() + 5);
    bool has_a = in_pool(scripts, "s_a");
    bool has_b = in_pool(scripts, "s_b");
    if (has_a && has_b) saw_mixed = true;
  }
  CHECK(saw_mixed);
}

TEST_CASE("mutation with zero probability returns the genome unchanged") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(31);
  PlanGenome genome = init_population(layout, 2, 1, 0.3, rng)[0];
  CHECK(mutate(genome, 0.0, layout, rng) == genome);
  CHECK_THROWS_WITH_AS(mutate(genome, -0.1, layout, rng),
                       doctest::Contains("must lie in [0,1]"), ConfigError);
}

TEST_CASE("an exhausted attraction pool only mutates toward zero") {
  RegionLayout layout = tiny_layout();
  PlanGenome genome = blank_day(layout);
  set_attraction_row(genome, 0, {"A", "B", "C", "0", "0"});
  genome.days[0].slots[10] = "walk";

  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    PlanGenome child = mutate(genome, 1.0, layout, rng);
    CHECK(genome_violation(child, layout, 1).empty());
    for (const std::string& v : attraction_row(child, 0)) {
      // The pool is fully used, so no slot can take a new nonzero value.
      CHECK((v == kEmptySlot || in_pool({"A", "B", "C"}, v)));
    }
    std::vector<std::string> row = attraction_row(child, 0);
    std::set<std::string> nonzero(row.begin(), row.end());
    nonzero.erase(kEmptySlot);
    CHECK(nonzero.size() <= 3);
  }
}

TEST_CASE("operators keep every invariant over ten thousand random steps") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  Rng rng(101);
  std::vector<PlanGenome> pool = init_population(layout, 2, 16, 0.3, rng);
  const double p_m_levels[] = {0.0, 0.2, 1.0};
  for (int step = 0; step < 10000; ++step) {
    const PlanGenome& a = pool[rng.index(pool.size())];
    const PlanGenome& b = pool[rng.index(pool.size())];
    PlanGenome child = crossover(a, b, layout, rng);
    std::string cross_violation = genome_violation(child, layout, 2);
    REQUIRE_MESSAGE(cross_violation.empty(), cross_violation);

    PlanGenome mutated = mutate(child, p_m_levels[step % 3], layout, rng);
    std::string mut_violation = genome_violation(mutated, layout, 2);
    REQUIRE_MESSAGE(mut_violation.empty(), mut_violation);

    if (step % 100 == 0) {
      CHECK(PlanGenome::parse(mutated.serialize()) == mutated);
    }
    pool[rng.index(pool.size())] = std::move(mutated);
  }
}

TEST_CASE("decoding keeps visit order and skips placeholders") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  PlanGenome genome = blank_day(layout);
  genome.days[0].slots[0] = "s_old_harbor";
  set_attraction_row(genome, 0, {"old_harbor", "0", "tide_fort", "0", "0"});
  genome.days[0].slots[10] = "t_tram";
  genome.days[0].slots[11] = "morning_net";
  genome.days[0].slots[12] = "brine_kitchen";
  genome.days[0].slots[13] = "tide_table";
  genome.days[0].slots[14] = "h_seawind";

  ItineraryPlan plan = decode(genome, g);
  REQUIRE(plan.days.size() == 1);
  CHECK(plan.days[0].visits == std::vector<std::string>{"old_harbor", "tide_fort"});
  CHECK(plan.sequence == plan.days[0].visits);
  CHECK(plan.days[0].commute == "t_tram");
  CHECK(plan.days[0].breakfast == "morning_net");
  CHECK(plan.days[0].lunch == "brine_kitchen");
  CHECK(plan.days[0].dinner == "tide_table");
  CHECK(plan.days[0].accommodation == "h_seawind");
  // Hints come back resolved to attraction ids, placeholder-free.
  REQUIRE(plan.days[0].script_hints.size() == 5);
  CHECK(plan.days[0].script_hints[0] == "old_harbor");
}

TEST_CASE("a visit-free day still carries meals and lodging") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  PlanGenome genome = blank_day(layout);
  genome.days[0].slots[0] = "s_mirror_basin";
  genome.days[0].slots[12] = "cliff_orchard";
  genome.days[0].slots[14] = "h_abbey_rest";

  ItineraryPlan plan = decode(genome, g);
  CHECK(plan.days[0].visits.empty());
  CHECK(plan.sequence.empty());
  CHECK(plan.days[0].lunch == "cliff_orchard");
  CHECK(plan.days[0].accommodation == "h_abbey_rest");
  CHECK(plan.days[0].commute.empty());
  CHECK(plan.days[0].breakfast.empty());
}

TEST_CASE("two-day decoding concatenates the visit sequence") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);
  PlanGenome genome = blank_day(layout);
  genome.days.push_back(genome.days[0]);
  set_attraction_row(genome, 0, {"old_harbor", "tide_fort", "0", "0", "0"});
  genome.days[0].slots[10] = "t_walk";
  set_attraction_row(genome, 1, {"glass_market", "0", "0", "0", "0"});

  ItineraryPlan plan = decode(genome, g);
  CHECK(plan.sequence ==
        std::vector<std::string>{"old_harbor", "tide_fort", "glass_market"});
  CHECK(plan.days[0].visits.size() == 2);
  CHECK(plan.days[1].visits.size() == 1);
}

TEST_CASE("decoding rejects dangling ids by domain") {
  KnowledgeGraph g = fixture_graph();
  RegionLayout layout = RegionLayout::from_graph(g);

  PlanGenome bad_attraction = blank_day(layout);
  set_attraction_row(bad_attraction, 0, {"ghost_pier", "0", "0", "0", "0"});
  CHECK_THROWS_WITH_AS(decode(bad_attraction, g),
                       doctest::Contains("attraction slot references unknown"),
                       ValidationError);

  PlanGenome bad_script = blank_day(layout);
  bad_script.days[0].slots[0] = "s_ghost_pier";
  CHECK_THROWS_WITH_AS(decode(bad_script, g),
                       doctest::Contains("unknown attraction"),
                       ValidationError);

  PlanGenome bad_meal = blank_day(layout);
  bad_meal.days[0].slots[12] = "vapor_bar";
  CHECK_THROWS_AS(decode(bad_meal, g), ValidationError);
}
