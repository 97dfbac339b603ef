#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tw/common.hpp"

namespace tw {

// One attraction with its five narrative attributes and trip economics.
struct AttractionNode {
  std::string id;
  std::string name;
  std::string historical_background;
  std::string cultural_significance;
  std::string historical_stories;
  std::string main_attractions;
  std::string geographical_location;
  double latitude = 0.0;
  double longitude = 0.0;
  double ticket_price = 0.0;
  double popularity = 0.0;
  // Set when ingestion could not fill every attribute.
  bool incomplete = false;

  bool operator==(const AttractionNode&) const = default;
};

// Undirected cultural link; endpoints are stored sorted so one pair has one
// canonical edge.
struct CulturalEdge {
  std::string a;
  std::string b;
  std::string relevance;
  double travel_time_hours = 0.0;

  bool operator==(const CulturalEdge&) const = default;
};

// Restaurant, accommodation, or transport option.
struct CatalogEntry {
  std::string id;
  std::string name;
  double price = 0.0;
  std::map<std::string, std::string> metadata;

  bool operator==(const CatalogEntry&) const = default;
};

// Great-circle distance in kilometers.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Immutable once constructed; construction validates the whole structure:
// unique ids across every domain, resolvable edge endpoints, at most one edge
// per pair, positive travel times, coordinates in range, and a connected
// attraction graph (when there are at least two attractions).
class KnowledgeGraph {
 public:
  static KnowledgeGraph load(const std::string& path);
  static KnowledgeGraph from_json_text(std::string_view text,
                                       const std::string& origin = "<inline>");
  static KnowledgeGraph from_parts(std::vector<AttractionNode> nodes,
                                   std::vector<CulturalEdge> edges,
                                   std::vector<CatalogEntry> restaurants,
                                   std::vector<CatalogEntry> accommodations,
                                   std::vector<CatalogEntry> transport_modes,
                                   double default_speed_kmh = 40.0);

  std::string to_json_text() const;
  void save(const std::string& path) const;

  bool has_node(std::string_view id) const;
  const AttractionNode& node(std::string_view id) const;
  const std::vector<AttractionNode>& nodes() const { return nodes_; }
  const std::vector<CulturalEdge>& edges() const { return edges_; }

  // Canonical edge for an unordered pair, or nullptr.
  const CulturalEdge* edge_between(std::string_view a, std::string_view b) const;

  // Hours between two attractions: the edge's recorded time when an edge
  // exists, otherwise great-circle distance at the default speed. Zero for a
  // node paired with itself.
  double travel_time(std::string_view a, std::string_view b) const;

  double default_speed_kmh() const { return default_speed_kmh_; }

  const std::vector<CatalogEntry>& restaurants() const { return restaurants_; }
  const std::vector<CatalogEntry>& accommodations() const {
    return accommodations_;
  }
  const std::vector<CatalogEntry>& transport_modes() const {
    return transport_modes_;
  }
  const CatalogEntry* restaurant(std::string_view id) const;
  const CatalogEntry* accommodation(std::string_view id) const;
  const CatalogEntry* transport_mode(std::string_view id) const;

  bool operator==(const KnowledgeGraph& other) const;

 private:
  KnowledgeGraph() = default;
  void build_indexes();
  void validate() const;

  std::vector<AttractionNode> nodes_;
  std::vector<CulturalEdge> edges_;
  std::vector<CatalogEntry> restaurants_;
  std::vector<CatalogEntry> accommodations_;
  std::vector<CatalogEntry> transport_modes_;
  double default_speed_kmh_ = 40.0;

  std::unordered_map<std::string, std::size_t> node_index_;
  std::unordered_map<std::string, std::size_t> edge_index_;
};

}  // namespace tw
