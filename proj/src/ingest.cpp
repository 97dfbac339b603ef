#include "tw/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <mutex>

#include "tw/prompts.hpp"

namespace tw {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kSummaryTemplate = R"(You are condensing a source
document about one attraction into structured attributes.

### Source document: {name}
{body}

### Task
Summarize the document into the five attributes below. Keep each entry concise
and factual, drawn only from the document. Leave an entry empty only when the
document truly gives nothing for it.

### Output format
Historical Background: <text>
Cultural Significance: <text>
Historical Stories: <text>
Main Attractions: <text>
Geographical Location: <text>
)";

constexpr std::string_view kRelevanceTemplate = R"(You are assessing whether
two attractions can be joined inside one narrative.

### Attraction A: {a_name}
{a_summary}

### Attraction B: {b_name}
{b_summary}

### Task
Decide whether the two attractions share a historical or cultural connection
worth building a scene transition on. Answer on the first line with
"Connection: yes" or "Connection: no". When yes, add one line
"Relevance: <the shared link in one sentence>".
)";

struct SourceDoc {
  std::string id;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  double ticket_price = 0.0;
  double popularity = 0.0;
  std::string body;
};

SourceDoc parse_doc(const std::string& path, const std::string& id) {
  std::string text = read_text_file(path);
  SourceDoc doc;
  doc.id = id;
  bool found = false;
  doc.name = extract_labeled_line(text, "Name", &found);
  if (!found || doc.name.empty()) {
    throw ParseError(path + ": document header needs a Name line");
  }
  std::string coords = extract_labeled_line(text, "Coordinates", &found);
  if (!found) {
    throw ParseError(path + ": document header needs a Coordinates line");
  }
  std::vector<std::string> parts = split(coords, ',');
  if (parts.size() != 2) {
    throw ParseError(path + ": Coordinates must be \"lat, lon\", got \"" +
                     coords + "\"");
  }
  try {
    doc.latitude = std::stod(trim(parts[0]));
    doc.longitude = std::stod(trim(parts[1]));
  } catch (const std::exception&) {
    throw ParseError(path + ": Coordinates are not numeric: \"" + coords +
                     "\"");
  }
  std::string ticket = extract_labeled_line(text, "Ticket", &found);
  if (found && !ticket.empty()) {
    try {
      doc.ticket_price = std::stod(ticket);
    } catch (const std::exception&) {
      throw ParseError(path + ": Ticket is not numeric: \"" + ticket + "\"");
    }
  }
  std::string pop = extract_labeled_line(text, "Popularity", &found);
  if (found && !pop.empty()) {
    try {
      doc.popularity = std::stod(pop);
    } catch (const std::exception&) {
      throw ParseError(path + ": Popularity is not numeric: \"" + pop + "\"");
    }
  }
  // Body: everything after the first blank line; falls back to full text.
  std::size_t blank = text.find("\n\n");
  doc.body = trim(blank == std::string::npos ? text : text.substr(blank + 2));
  return doc;
}

std::string summarize_attributes(const SourceDoc& doc, AttractionNode& node,
                                 TextProvider& provider,
                                 const IngestOptions& opts) {
  std::string prompt = render_template(
      kSummaryTemplate, {{"name", doc.name}, {"body", doc.body}});
  CompletionRequest req;
  req.model = "ingest";
  req.prompt = prompt;
  req.temperature = 0.3;
  std::string reply;
  for (int attempt = 0;; ++attempt) {
    try {
      reply = provider.complete(req);
      break;
    } catch (const ProviderError&) {
      if (attempt >= opts.retries) throw;
    }
  }
  node.historical_background =
      extract_labeled_line(reply, "Historical Background");
  node.cultural_significance =
      extract_labeled_line(reply, "Cultural Significance");
  node.historical_stories = extract_labeled_line(reply, "Historical Stories");
  node.main_attractions = extract_labeled_line(reply, "Main Attractions");
  node.geographical_location =
      extract_labeled_line(reply, "Geographical Location");
  node.incomplete = node.historical_background.empty() ||
                    node.cultural_significance.empty() ||
                    node.historical_stories.empty() ||
                    node.main_attractions.empty() ||
                    node.geographical_location.empty();
  return reply;
}

std::string node_summary(const AttractionNode& node) {
  std::string out;
  out += "Historical Background: " + node.historical_background + "\n";
  out += "Cultural Significance: " + node.cultural_significance + "\n";
  out += "Historical Stories: " + node.historical_stories + "\n";
  return out;
}

std::optional<std::string> propose_relevance(const AttractionNode& a,
                                             const AttractionNode& b,
                                             TextProvider& provider,
                                             const IngestOptions& opts) {
  std::string prompt = render_template(kRelevanceTemplate,
                                       {{"a_name", a.name},
                                        {"a_summary", node_summary(a)},
                                        {"b_name", b.name},
                                        {"b_summary", node_summary(b)}});
  CompletionRequest req;
  req.model = "ingest";
  req.prompt = prompt;
  req.temperature = 0.3;
  std::string reply;
  for (int attempt = 0;; ++attempt) {
    try {
      reply = provider.complete(req);
      break;
    } catch (const ProviderError&) {
      if (attempt >= opts.retries) throw;
    }
  }
  std::string verdict = lowercase(extract_labeled_line(reply, "Connection"));
  if (verdict != "yes") return std::nullopt;
  std::string relevance = extract_labeled_line(reply, "Relevance");
  if (relevance.empty()) relevance = a.name + " and " + b.name + " share a link";
  return relevance;
}

std::vector<CulturalEdge> parse_manual_edges(const std::string& path) {
  std::vector<CulturalEdge> edges;
  int line_no = 0;
  for (const std::string& raw : split(read_text_file(path), '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts = split(line, '|');
    if (parts.size() != 4) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected a|b|hours|relevance");
    }
    CulturalEdge e;
    e.a = trim(parts[0]);
    e.b = trim(parts[1]);
    try {
      e.travel_time_hours = std::stod(trim(parts[2]));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": hours not numeric: \"" + parts[2] + "\"");
    }
    e.relevance = trim(parts[3]);
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace

KnowledgeGraph ingest_attractions(
    const std::string& docs_dir, TextProvider& provider,
    const IngestOptions& opts,
    const std::optional<std::string>& manual_edges_path) {
  std::vector<std::pair<std::string, std::string>> files;  // (id, path)
  for (const auto& entry : fs::directory_iterator(docs_dir)) {
    if (!entry.is_regular_file()) continue;
    fs::path p = entry.path();
    if (p.extension() != ".txt") continue;
    files.emplace_back(p.stem().string(), p.string());
  }
  if (files.empty()) {
    throw ConfigError("no attraction documents in " + docs_dir);
  }
  std::sort(files.begin(), files.end());

  std::vector<SourceDoc> docs;
  docs.reserve(files.size());
  for (const auto& [id, path] : files) docs.push_back(parse_doc(path, id));

  std::vector<AttractionNode> nodes(docs.size());
  std::vector<std::string> failures;
  std::mutex failures_mutex;
  bounded_parallel_for(docs.size(), opts.in_flight, [&](std::size_t i) {
    AttractionNode node;
    node.id = docs[i].id;
    node.name = docs[i].name;
    node.latitude = docs[i].latitude;
    node.longitude = docs[i].longitude;
    node.ticket_price = docs[i].ticket_price;
    node.popularity = docs[i].popularity;
    try {
      summarize_attributes(docs[i], node, provider, opts);
    } catch (const ProviderError&) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      failures.push_back(docs[i].id);
    }
    nodes[i] = std::move(node);
  });
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    throw ProviderError("ingestion failed for: " + join(failures, ", "));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      pairs.emplace_back(i, j);
    }
  }
  std::vector<std::optional<CulturalEdge>> proposed(pairs.size());
  bounded_parallel_for(pairs.size(), opts.in_flight, [&](std::size_t k) {
    const AttractionNode& a = nodes[pairs[k].first];
    const AttractionNode& b = nodes[pairs[k].second];
    try {
      std::optional<std::string> relevance =
          propose_relevance(a, b, provider, opts);
      if (relevance.has_value()) {
        CulturalEdge e;
        e.a = a.id;
        e.b = b.id;
        e.relevance = *relevance;
        double km =
            haversine_km(a.latitude, a.longitude, b.latitude, b.longitude);
        e.travel_time_hours = std::max(km / opts.default_speed_kmh, 1e-3);
        proposed[k] = std::move(e);
      }
    } catch (const ProviderError&) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      failures.push_back(a.id + "|" + b.id);
    }
  });
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    throw ProviderError("ingestion failed for: " + join(failures, ", "));
  }

  std::vector<CulturalEdge> edges;
  for (auto& e : proposed) {
    if (e.has_value()) edges.push_back(std::move(*e));
  }
  if (manual_edges_path.has_value()) {
    for (CulturalEdge manual : parse_manual_edges(*manual_edges_path)) {
      if (manual.a > manual.b) std::swap(manual.a, manual.b);
      auto match = std::find_if(edges.begin(), edges.end(),
                                [&](const CulturalEdge& e) {
                                  return e.a == manual.a && e.b == manual.b;
                                });
      if (match != edges.end()) {
        *match = std::move(manual);
      } else {
        edges.push_back(std::move(manual));
      }
    }
  }

  return KnowledgeGraph::from_parts(std::move(nodes), std::move(edges), {}, {},
                                    {}, opts.default_speed_kmh);
}

}  // namespace tw
