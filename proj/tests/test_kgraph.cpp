#include <cmath>
#include <set>

#include "doctest.h"
#include "tw/kgraph.hpp"

using namespace tw;

namespace {

std::string fixture_graph_path() {
  return std::string(TW_FIXTURES_DIR) + "/toycity/graph.json";
}

AttractionNode node_at(const std::string& id, double lat, double lon,
                       double popularity = 10.0) {
  AttractionNode n;
  n.id = id;
  n.name = id;
  n.historical_background = "hb " + id;
  n.cultural_significance = "cs " + id;
  n.historical_stories = "hs " + id;
  n.main_attractions = "ma " + id;
  n.geographical_location = "gl " + id;
  n.latitude = lat;
  n.longitude = lon;
  n.popularity = popularity;
  return n;
}

CulturalEdge edge(const std::string& a, const std::string& b, double hours) {
  CulturalEdge e;
  e.a = a;
  e.b = b;
  e.relevance = a + " to " + b;
  e.travel_time_hours = hours;
  return e;
}

}  // namespace

TEST_CASE("two-node one-edge graph loads") {
  std::string text = R"({
    "format_version": 1,
    "nodes": [
      {"id": "a", "latitude": 0.0, "longitude": 0.0},
      {"id": "b", "latitude": 1.0, "longitude": 1.0}
    ],
    "edges": [{"endpoints": ["a", "b"], "travel_time_hours": 2.0}]
  })";
  KnowledgeGraph g = KnowledgeGraph::from_json_text(text);
  CHECK(g.nodes().size() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.travel_time("a", "b") == 2.0);
}

TEST_CASE("edge referencing an unknown id is rejected") {
  std::string text = R"({
    "nodes": [
      {"id": "a", "latitude": 0.0, "longitude": 0.0},
      {"id": "b", "latitude": 1.0, "longitude": 1.0}
    ],
    "edges": [{"endpoints": ["a", "x9"], "travel_time_hours": 1.0}]
  })";
  CHECK_THROWS_WITH_AS(KnowledgeGraph::from_json_text(text),
                       doctest::Contains("unknown endpoint x9"),
                       ValidationError);
}

TEST_CASE("toy-city fixture loads and is connected by BFS oracle") {
  KnowledgeGraph g = KnowledgeGraph::load(fixture_graph_path());
  REQUIRE(g.nodes().size() == 12);
  CHECK(g.edges().size() == 18);
  CHECK(g.restaurants().size() == 10);
  CHECK(g.accommodations().size() == 4);
  CHECK(g.transport_modes().size() == 4);

  // Independent reachability check over the loaded edge list.
  std::set<std::string> reached = {g.nodes().front().id};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const CulturalEdge& e : g.edges()) {
      if (reached.count(e.a) != reached.count(e.b)) {
        reached.insert(e.a);
        reached.insert(e.b);
        grew = true;
      }
    }
  }
  CHECK(reached.size() == g.nodes().size());
}

TEST_CASE("travel_time returns the stored edge value symmetrically") {
  KnowledgeGraph g = KnowledgeGraph::load(fixture_graph_path());
  CHECK(g.travel_time("old_harbor", "tide_fort") == 0.3);
  CHECK(g.travel_time("tide_fort", "old_harbor") == 0.3);
  for (const CulturalEdge& e : g.edges()) {
    CHECK(g.travel_time(e.a, e.b) == g.travel_time(e.b, e.a));
    CHECK(g.travel_time(e.a, e.b) > 0.0);
  }
}

TEST_CASE("travel_time falls back to haversine distance at default speed") {
  // One degree of latitude is about 111.19 km; at 40 km/h that is 2.78 h.
  std::vector<AttractionNode> nodes = {node_at("p", 0.0, 0.0),
                                       node_at("q", 1.0, 0.0)};
  KnowledgeGraph g = KnowledgeGraph::from_parts(
      nodes, {edge("p", "q", 5.0)}, {}, {}, {}, 40.0);
  CHECK(g.travel_time("p", "q") == 5.0);

  std::vector<AttractionNode> tri = {node_at("p", 0.0, 0.0),
                                     node_at("q", 1.0, 0.0),
                                     node_at("r", 0.5, 0.0)};
  KnowledgeGraph g2 = KnowledgeGraph::from_parts(
      tri, {edge("p", "r", 1.0), edge("q", "r", 1.0)}, {}, {}, {}, 40.0);
  double t = g2.travel_time("p", "q");
  CHECK(t == doctest::Approx(2.78).epsilon(0.001));
  CHECK(g2.travel_time("q", "p") == t);
  CHECK(g2.travel_time("p", "p") == 0.0);
}

TEST_CASE("haversine_km matches a hand value") {
  CHECK(haversine_km(0.0, 0.0, 1.0, 0.0) == doctest::Approx(111.19).epsilon(0.001));
  CHECK(haversine_km(43.7, 7.27, 43.7, 7.27) == 0.0);
}

TEST_CASE("unknown ids are rejected by queries") {
  KnowledgeGraph g = KnowledgeGraph::load(fixture_graph_path());
  CHECK_THROWS_AS(g.node("nope"), Error);
  CHECK_THROWS_AS(g.travel_time("old_harbor", "nope"), Error);
  CHECK_FALSE(g.has_node("nope"));
  CHECK(g.has_node("old_harbor"));
}

TEST_CASE("serialization round-trips field-wise") {
  KnowledgeGraph g = KnowledgeGraph::load(fixture_graph_path());
  std::string text = g.to_json_text();
  KnowledgeGraph h = KnowledgeGraph::from_json_text(text);
  CHECK(g == h);
  CHECK(h.to_json_text() == text);
}

TEST_CASE("single node is accepted; two components are not") {
  KnowledgeGraph solo =
      KnowledgeGraph::from_parts({node_at("only", 10.0, 10.0)}, {}, {}, {}, {});
  CHECK(solo.nodes().size() == 1);

  std::vector<AttractionNode> nodes = {
      node_at("a", 0.0, 0.0), node_at("b", 0.1, 0.1), node_at("c", 5.0, 5.0),
      node_at("d", 5.1, 5.1)};
  CHECK_THROWS_WITH_AS(
      KnowledgeGraph::from_parts(
          nodes, {edge("a", "b", 0.5), edge("c", "d", 0.5)}, {}, {}, {}),
      doctest::Contains("not connected"), ValidationError);
}

TEST_CASE("duplicate ids anywhere in the graph are rejected") {
  std::vector<AttractionNode> nodes = {node_at("a", 0.0, 0.0),
                                       node_at("a", 1.0, 1.0)};
  CHECK_THROWS_WITH_AS(KnowledgeGraph::from_parts(nodes, {}, {}, {}, {}),
                       doctest::Contains("duplicate id"), ValidationError);

  CatalogEntry r;
  r.id = "a";
  r.name = "restaurant shadowing a node id";
  CHECK_THROWS_WITH_AS(
      KnowledgeGraph::from_parts({node_at("a", 0.0, 0.0)}, {}, {r}, {}, {}),
      doctest::Contains("duplicate id"), ValidationError);
}

TEST_CASE("edge invariants: self loops, nonpositive times, duplicates") {
  std::vector<AttractionNode> nodes = {node_at("a", 0.0, 0.0),
                                       node_at("b", 1.0, 1.0)};
  CHECK_THROWS_AS(
      KnowledgeGraph::from_parts(nodes, {edge("a", "a", 1.0)}, {}, {}, {}),
      ValidationError);
  CHECK_THROWS_AS(
      KnowledgeGraph::from_parts(nodes, {edge("a", "b", 0.0)}, {}, {}, {}),
      ValidationError);
  CHECK_THROWS_WITH_AS(
      KnowledgeGraph::from_parts(
          nodes, {edge("a", "b", 1.0), edge("b", "a", 2.0)}, {}, {}, {}),
      doctest::Contains("duplicate edge"), ValidationError);
}

TEST_CASE("coordinate and price ranges are validated") {
  CHECK_THROWS_AS(
      KnowledgeGraph::from_parts({node_at("a", 95.0, 0.0)}, {}, {}, {}, {}),
      ValidationError);
  CHECK_THROWS_AS(
      KnowledgeGraph::from_parts({node_at("a", 0.0, 185.0)}, {}, {}, {}, {}),
      ValidationError);
  AttractionNode n = node_at("a", 0.0, 0.0);
  n.ticket_price = -1.0;
  CHECK_THROWS_AS(KnowledgeGraph::from_parts({n}, {}, {}, {}, {}),
                  ValidationError);
  AttractionNode m = node_at("a", 0.0, 0.0);
  m.popularity = -5.0;
  CHECK_THROWS_AS(KnowledgeGraph::from_parts({m}, {}, {}, {}, {}),
                  ValidationError);
}

TEST_CASE("malformed JSON reports the origin") {
  CHECK_THROWS_WITH_AS(KnowledgeGraph::from_json_text("{not json", "bad.json"),
                       doctest::Contains("bad.json"), ParseError);
}

TEST_CASE("side catalogs are queryable by id") {
  KnowledgeGraph g = KnowledgeGraph::load(fixture_graph_path());
  const CatalogEntry* r = g.restaurant("brine_kitchen");
  REQUIRE(r != nullptr);
  CHECK(r->price == 18.0);
  CHECK(r->metadata.at("cuisine") == "coastal");
  CHECK(g.restaurant("nope") == nullptr);
  const CatalogEntry* h = g.accommodation("h_seawind");
  REQUIRE(h != nullptr);
  CHECK(h->metadata.at("room_type") == "double");
  const CatalogEntry* t = g.transport_mode("t_walk");
  REQUIRE(t != nullptr);
  CHECK(t->price == 0.0);
}
