#pragma once

#include <optional>
#include <string>

#include "tw/kgraph.hpp"
#include "tw/provider.hpp"

namespace tw {

struct IngestOptions {
  int retries = 2;
  int in_flight = 4;
  double default_speed_kmh = 40.0;
};

// Builds a graph from a directory of per-attraction documents (one UTF-8
// file per attraction, filename = id). Each document carries a header block
// (Name, Coordinates, optional Ticket and Popularity) followed by free text;
// the provider condenses the text into the five narrative attributes and
// proposes which pairs share a cultural link. Proposed edges get haversine
// travel times at the configured speed. An optional manual edge file
// ("a|b|hours|relevance" lines, '#' comments) overrides and extends the
// proposals. The result passes full graph validation.
//
// Header parse failures throw immediately. Provider failures are collected;
// when any document or pair still fails after retries, a ProviderError lists
// every failed item.
KnowledgeGraph ingest_attractions(
    const std::string& docs_dir, TextProvider& provider,
    const IngestOptions& opts = {},
    const std::optional<std::string>& manual_edges_path = std::nullopt);

}  // namespace tw
