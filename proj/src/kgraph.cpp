#include "tw/kgraph.hpp"

#include <cmath>
#include <deque>
#include <unordered_set>

#include "json.hpp"

namespace tw {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kPi = 3.14159265358979323846;

using ordered_json = nlohmann::ordered_json;

std::string pair_key(std::string_view a, std::string_view b) {
  std::string key;
  if (a <= b) {
    key.append(a).push_back('\x1f');
    key.append(b);
  } else {
    key.append(b).push_back('\x1f');
    key.append(a);
  }
  return key;
}

ordered_json catalog_to_json(const std::vector<CatalogEntry>& entries) {
  ordered_json arr = ordered_json::array();
  for (const CatalogEntry& e : entries) {
    ordered_json j;
    j["id"] = e.id;
    j["name"] = e.name;
    j["price"] = e.price;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : e.metadata) meta[k] = v;
    j["metadata"] = meta;
    arr.push_back(j);
  }
  return arr;
}

std::vector<CatalogEntry> catalog_from_json(const ordered_json& arr,
                                            const std::string& origin,
                                            const char* section) {
  if (!arr.is_array()) {
    throw ParseError(origin + ": " + section + " must be an array");
  }
  std::vector<CatalogEntry> out;
  for (const auto& j : arr) {
    CatalogEntry e;
    e.id = j.at("id").get<std::string>();
    e.name = j.value("name", e.id);
    e.price = j.value("price", 0.0);
    if (j.contains("metadata")) {
      for (const auto& [k, v] : j.at("metadata").items()) {
        e.metadata[k] = v.get<std::string>();
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

const CatalogEntry* find_entry(const std::vector<CatalogEntry>& entries,
                               std::string_view id) {
  for (const CatalogEntry& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  double phi1 = lat1 * kPi / 180.0;
  double phi2 = lat2 * kPi / 180.0;
  double dphi = (lat2 - lat1) * kPi / 180.0;
  double dlambda = (lon2 - lon1) * kPi / 180.0;
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path) {
  return from_json_text(read_text_file(path), path);
}

KnowledgeGraph KnowledgeGraph::from_json_text(std::string_view text,
                                              const std::string& origin) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(origin + ": invalid JSON: " + e.what());
  }
  try {
    KnowledgeGraph g;
    g.default_speed_kmh_ = root.value("default_speed_kmh", 40.0);
    for (const auto& j : root.value("nodes", ordered_json::array())) {
      AttractionNode n;
      n.id = j.at("id").get<std::string>();
      n.name = j.value("name", n.id);
      n.historical_background = j.value("historical_background", "");
      n.cultural_significance = j.value("cultural_significance", "");
      n.historical_stories = j.value("historical_stories", "");
      n.main_attractions = j.value("main_attractions", "");
      n.geographical_location = j.value("geographical_location", "");
      n.latitude = j.at("latitude").get<double>();
      n.longitude = j.at("longitude").get<double>();
      n.ticket_price = j.value("ticket_price", 0.0);
      n.popularity = j.value("popularity", 0.0);
      n.incomplete = j.value("incomplete", false);
      g.nodes_.push_back(std::move(n));
    }
    for (const auto& j : root.value("edges", ordered_json::array())) {
      CulturalEdge e;
      const auto& ends = j.at("endpoints");
      if (!ends.is_array() || ends.size() != 2) {
        throw ParseError("edge endpoints must be a two-element array");
      }
      std::string a = ends[0].get<std::string>();
      std::string b = ends[1].get<std::string>();
      if (a <= b) {
        e.a = std::move(a);
        e.b = std::move(b);
      } else {
        e.a = std::move(b);
        e.b = std::move(a);
      }
      e.relevance = j.value("relevance", "");
      e.travel_time_hours = j.at("travel_time_hours").get<double>();
      g.edges_.push_back(std::move(e));
    }
    g.restaurants_ = catalog_from_json(root.value("restaurants", ordered_json::array()),
                                       origin, "restaurants");
    g.accommodations_ = catalog_from_json(
        root.value("accommodations", ordered_json::array()), origin,
        "accommodations");
    g.transport_modes_ = catalog_from_json(
        root.value("transport_modes", ordered_json::array()), origin,
        "transport_modes");
    g.build_indexes();
    g.validate();
    return g;
  } catch (const ordered_json::exception& e) {
    throw ParseError(origin + ": malformed graph JSON: " + e.what());
  }
}

KnowledgeGraph KnowledgeGraph::from_parts(
    std::vector<AttractionNode> nodes, std::vector<CulturalEdge> edges,
    std::vector<CatalogEntry> restaurants,
    std::vector<CatalogEntry> accommodations,
    std::vector<CatalogEntry> transport_modes, double default_speed_kmh) {
  KnowledgeGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  for (CulturalEdge& e : g.edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  g.restaurants_ = std::move(restaurants);
  g.accommodations_ = std::move(accommodations);
  g.transport_modes_ = std::move(transport_modes);
  g.default_speed_kmh_ = default_speed_kmh;
  g.build_indexes();
  g.validate();
  return g;
}

std::string KnowledgeGraph::to_json_text() const {
  ordered_json root;
  root["format_version"] = 1;
  root["default_speed_kmh"] = default_speed_kmh_;
  ordered_json nodes = ordered_json::array();
  for (const AttractionNode& n : nodes_) {
    ordered_json j;
    j["id"] = n.id;
    j["name"] = n.name;
    j["historical_background"] = n.historical_background;
    j["cultural_significance"] = n.cultural_significance;
    j["historical_stories"] = n.historical_stories;
    j["main_attractions"] = n.main_attractions;
    j["geographical_location"] = n.geographical_location;
    j["latitude"] = n.latitude;
    j["longitude"] = n.longitude;
    j["ticket_price"] = n.ticket_price;
    j["popularity"] = n.popularity;
    if (n.incomplete) j["incomplete"] = true;
    nodes.push_back(j);
  }
  root["nodes"] = nodes;
  ordered_json edges = ordered_json::array();
  for (const CulturalEdge& e : edges_) {
    ordered_json j;
    j["endpoints"] = ordered_json::array({e.a, e.b});
    j["relevance"] = e.relevance;
    j["travel_time_hours"] = e.travel_time_hours;
    edges.push_back(j);
  }
  root["edges"] = edges;
  root["restaurants"] = catalog_to_json(restaurants_);
  root["accommodations"] = catalog_to_json(accommodations_);
  root["transport_modes"] = catalog_to_json(transport_modes_);
  return root.dump(2) + "\n";
}

void KnowledgeGraph::save(const std::string& path) const {
  write_text_file(path, to_json_text());
}

bool KnowledgeGraph::has_node(std::string_view id) const {
  return node_index_.find(std::string(id)) != node_index_.end();
}

const AttractionNode& KnowledgeGraph::node(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  if (it == node_index_.end()) {
    throw ValidationError("unknown attraction id: " + std::string(id));
  }
  return nodes_[it->second];
}

const CulturalEdge* KnowledgeGraph::edge_between(std::string_view a,
                                                 std::string_view b) const {
  auto it = edge_index_.find(pair_key(a, b));
  if (it == edge_index_.end()) return nullptr;
  return &edges_[it->second];
}

double KnowledgeGraph::travel_time(std::string_view a, std::string_view b) const {
  if (a == b) return 0.0;
  if (const CulturalEdge* e = edge_between(a, b)) return e->travel_time_hours;
  const AttractionNode& na = node(a);
  const AttractionNode& nb = node(b);
  double km = haversine_km(na.latitude, na.longitude, nb.latitude, nb.longitude);
  return km / default_speed_kmh_;
}

const CatalogEntry* KnowledgeGraph::restaurant(std::string_view id) const {
  return find_entry(restaurants_, id);
}

const CatalogEntry* KnowledgeGraph::accommodation(std::string_view id) const {
  return find_entry(accommodations_, id);
}

const CatalogEntry* KnowledgeGraph::transport_mode(std::string_view id) const {
  return find_entry(transport_modes_, id);
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  return nodes_ == other.nodes_ && edges_ == other.edges_ &&
         restaurants_ == other.restaurants_ &&
         accommodations_ == other.accommodations_ &&
         transport_modes_ == other.transport_modes_ &&
         default_speed_kmh_ == other.default_speed_kmh_;
}

void KnowledgeGraph::build_indexes() {
  node_index_.clear();
  edge_index_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    node_index_[nodes_[i].id] = i;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    edge_index_[pair_key(edges_[i].a, edges_[i].b)] = i;
  }
}

void KnowledgeGraph::validate() const {
  if (default_speed_kmh_ <= 0.0) {
    throw ValidationError("default_speed_kmh must be positive");
  }
  std::unordered_set<std::string> all_ids;
  auto claim_id = [&](const std::string& id, const char* domain) {
    if (id.empty()) {
      throw ValidationError(std::string(domain) + " entry with empty id");
    }
    if (!all_ids.insert(id).second) {
      throw ValidationError("duplicate id across the graph: " + id);
    }
  };
  for (const AttractionNode& n : nodes_) {
    claim_id(n.id, "attraction");
    if (n.latitude < -90.0 || n.latitude > 90.0) {
      throw ValidationError("attraction " + n.id + ": latitude out of range");
    }
    if (n.longitude < -180.0 || n.longitude > 180.0) {
      throw ValidationError("attraction " + n.id + ": longitude out of range");
    }
    if (n.ticket_price < 0.0) {
      throw ValidationError("attraction " + n.id + ": negative ticket price");
    }
    if (n.popularity < 0.0) {
      throw ValidationError("attraction " + n.id + ": negative popularity");
    }
  }
  for (const CatalogEntry& e : restaurants_) claim_id(e.id, "restaurant");
  for (const CatalogEntry& e : accommodations_) claim_id(e.id, "accommodation");
  for (const CatalogEntry& e : transport_modes_) claim_id(e.id, "transport");
  for (const CatalogEntry& e : restaurants_) {
    if (e.price < 0.0) {
      throw ValidationError("restaurant " + e.id + ": negative price");
    }
  }
  for (const CatalogEntry& e : accommodations_) {
    if (e.price < 0.0) {
      throw ValidationError("accommodation " + e.id + ": negative price");
    }
  }

  std::unordered_set<std::string> seen_pairs;
  for (const CulturalEdge& e : edges_) {
    if (e.a == e.b) {
      throw ValidationError("edge connects " + e.a + " to itself");
    }
    if (node_index_.find(e.a) == node_index_.end()) {
      throw ValidationError("unknown endpoint " + e.a);
    }
    if (node_index_.find(e.b) == node_index_.end()) {
      throw ValidationError("unknown endpoint " + e.b);
    }
    if (e.travel_time_hours <= 0.0) {
      throw ValidationError("edge " + e.a + "|" + e.b +
                            ": travel time must be positive");
    }
    if (!seen_pairs.insert(pair_key(e.a, e.b)).second) {
      throw ValidationError("duplicate edge for pair " + e.a + "|" + e.b);
    }
  }

  // Attractions must form one connected component so every pair of sites can
  // anchor a narrative route.
  if (nodes_.size() >= 2) {
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const CulturalEdge& e : edges_) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    std::unordered_set<std::string> seen;
    std::deque<std::string> frontier{nodes_.front().id};
    seen.insert(nodes_.front().id);
    while (!frontier.empty()) {
      std::string cur = frontier.front();
      frontier.pop_front();
      for (const std::string& next : adj[cur]) {
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
    if (seen.size() != nodes_.size()) {
      for (const AttractionNode& n : nodes_) {
        if (seen.find(n.id) == seen.end()) {
          throw ValidationError(
              "attraction graph is not connected; unreachable node: " + n.id);
        }
      }
    }
  }
}

}  // namespace tw
