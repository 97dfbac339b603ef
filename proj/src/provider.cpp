#include "tw/provider.hpp"

#include <array>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace tw {

namespace {

uint64_t mix(uint64_t h, uint64_t salt) { return splitmix64(h ^ splitmix64(salt)); }

template <std::size_t N>
std::string_view pick_word(uint64_t h, uint64_t salt,
                           const std::array<std::string_view, N>& words) {
  return words[mix(h, salt) % N];
}

constexpr std::array<std::string_view, 8> kEraWords = {
    "tidebound", "lantern-lit", "salt-sworn", "cartographic",
    "bell-cast",  "terraced",    "mirror-dark", "funicular"};
constexpr std::array<std::string_view, 8> kThemeWords = {
    "memory",   "passage",   "craft",  "pilgrimage",
    "harvest",  "signal",    "refuge", "exchange"};
constexpr std::array<std::string_view, 8> kMoodWords = {
    "quiet",   "restless", "gilded", "weathered",
    "echoing", "steadfast", "bright", "shadowed"};
constexpr std::array<std::string_view, 8> kObjectWords = {
    "ledger", "compass", "bell",   "loom",
    "chart",  "key",     "lantern", "tide-glass"};

// Value after "<marker>" up to end of line, trimmed.
std::string after_marker(std::string_view text, std::string_view marker) {
  std::size_t pos = text.find(marker);
  if (pos == std::string_view::npos) return "";
  pos += marker.size();
  std::size_t eol = text.find('\n', pos);
  if (eol == std::string_view::npos) eol = text.size();
  return trim(text.substr(pos, eol - pos));
}

// Bullet names out of the "### Attractions" block: lines "- Name (...)".
std::vector<std::string> bullet_names(std::string_view prompt) {
  std::vector<std::string> names;
  std::size_t block = prompt.find("### Attractions");
  if (block == std::string_view::npos) return names;
  std::size_t end = prompt.find("### Task", block);
  if (end == std::string_view::npos) end = prompt.size();
  std::string_view section = prompt.substr(block, end - block);
  for (const std::string& line : split(std::string(section), '\n')) {
    std::string t = trim(line);
    if (t.size() < 3 || t[0] != '-' || t[1] != ' ') continue;
    std::string body = t.substr(2);
    std::size_t paren = body.find(" (");
    names.push_back(trim(paren == std::string::npos ? body
                                                    : body.substr(0, paren)));
  }
  return names;
}

std::string mock_survey(uint64_t h) {
  std::string out;
  for (int i = 0; i < 12; ++i) {
    if (i > 0) out += ",";
    out += std::to_string(1 + mix(h, 0x50u + static_cast<uint64_t>(i)) % 5);
  }
  return out;
}

std::string mock_judge(uint64_t h) {
  auto score = [&](uint64_t salt) {
    return std::to_string(mix(h, salt) % 11);
  };
  std::string out;
  out += "1. **Plot Coherence**\n";
  out += "- **Event Logic**: " + score(0x90) + "\n";
  out += "- **Attraction Relevance**: " + score(0x91) + "\n";
  out += "- **Transition Smoothness**: " + score(0x92) + "\n";
  out += "\n2. **Character Interaction**\n";
  out += "- **Dialogue Authenticity**: " + score(0x93) + "\n";
  out += "- **Cultural-Driven Actions**: " + score(0x94) + "\n";
  out += "\n3. **Time and Space Coherence**\n";
  out += "- **Spatiotemporal Corridor**: " + score(0x95) + "\n";
  out += "- **Route Rationality**: " + score(0x96) + "\n";
  out += "\n4. **Cultural Fit**\n";
  out += "- **Cultural Depth**: " + score(0x97) + "\n";
  out += "- **Multi-Dimensional Linkage**: " + score(0x98) + "\n";
  return out;
}

std::string mock_relevance(uint64_t h, std::string_view prompt) {
  std::string a = after_marker(prompt, "### Attraction A: ");
  std::string b = after_marker(prompt, "### Attraction B: ");
  if (mix(h, 0xA1) % 3 == 0) {
    return "Connection: no\n";
  }
  std::string out = "Connection: yes\n";
  out += "Relevance: ";
  out += a + " and " + b + " both carry the " +
         std::string(pick_word(h, 0xA2, kThemeWords)) + " thread of the " +
         std::string(pick_word(h, 0xA3, kEraWords)) + " era.\n";
  return out;
}

std::string mock_doc_summary(uint64_t h, std::string_view prompt) {
  std::string name = after_marker(prompt, "### Source document: ");
  auto era = pick_word(h, 0xB1, kEraWords);
  auto theme = pick_word(h, 0xB2, kThemeWords);
  auto mood = pick_word(h, 0xB3, kMoodWords);
  auto object = pick_word(h, 0xB4, kObjectWords);
  std::string out;
  out += "Historical Background: Records trace " + name + " through the " +
         std::string(era) + " years, when the district was rebuilt around it.\n";
  out += "Cultural Significance: " + name + " anchors the city's " +
         std::string(theme) + " tradition and still hosts its seasonal rites.\n";
  out += "Historical Stories: Keepers of " + name + " tell of a " +
         std::string(mood) + " night when a single " + std::string(object) +
         " decided the harbor's fate.\n";
  out += "Main Attractions: The " + std::string(object) + " hall, the " +
         std::string(era) + " gallery, and the view over the old quarter.\n";
  out += "Geographical Location: On the " + std::string(mood) +
         " side of the city, a short walk from the water.\n";
  return out;
}

std::string mock_worldview(uint64_t h, std::string_view prompt) {
  std::vector<std::string> names = bullet_names(prompt);
  std::string title = "The " + std::string(pick_word(h, 0x11, kMoodWords)) +
                      " " + std::string(pick_word(h, 0x12, kObjectWords)) +
                      " of the " + std::string(pick_word(h, 0x13, kEraWords)) +
                      " city";
  std::string out = "Title: " + title + "\n";
  out += "Background: Beneath the waking city runs a second geography, kept by "
         "wardens of the " + std::string(pick_word(h, 0x14, kThemeWords)) +
         ". ";
  for (const std::string& n : names) {
    out += "The chronicle binds " + n + " into the lattice as a gate of the " +
           std::string(pick_word(h, fnv1a64(n), kThemeWords)) + ". ";
  }
  out += "Travelers who read the signs may cross between eras without losing "
         "the thread of their own.\n";
  out += "World Rules:\n";
  out += "1. Every gate opens only to those who carry a token of its craft.\n";
  out += "2. Crossings preserve memory; nothing learned is lost between eras.\n";
  out += "3. The wardens guide but never decide; the traveler chooses the path.\n";
  return out;
}

std::string mock_characters(uint64_t h) {
  std::string out;
  out += "User Character\n";
  out += "Name: Traveler-01\n";
  out += "Identity: A visiting chronicler drawn to the city's layered past\n";
  out += "Personality: " + std::string(pick_word(h, 0x21, kMoodWords)) +
         ", curious, slow to judge\n";
  out += "Backstory: Raised far inland, they inherited a " +
         std::string(pick_word(h, 0x22, kObjectWords)) +
         " that points toward the old quarter whenever the tide turns.\n";
  out += "\nGuide Character\n";
  out += "Name: Guide-01\n";
  out += "Identity: A warden of the second geography\n";
  out += "Expertise: Reading the " + std::string(pick_word(h, 0x23, kEraWords)) +
         " signs that open the gates\n";
  out += "Purpose: Sworn to walk with any chronicler until the lattice is "
         "mapped again.\n";
  return out;
}

std::string mock_exposition(uint64_t h, std::string_view prompt) {
  std::string user = after_marker(prompt, "Traveler: ");
  std::string guide = after_marker(prompt, "Guide: ");
  std::string out;
  out += "The city wakes twice, once for its markets and once for its " +
         std::string(pick_word(h, 0x31, kThemeWords)) + ". ";
  out += user + " arrives with more questions than luggage and meets " + guide +
         " at the edge of the old quarter, where the first gate hums under the "
         "paving stones. ";
  out += "They agree on the terms of the journey: " + guide +
         " opens the way, " + user +
         " keeps the record, and neither leaves a story unfinished. ";
  out += "Ahead wait the gates of the lattice, each holding a " +
         std::string(pick_word(h, 0x32, kObjectWords)) +
         " and a debt of memory.\n";
  return out;
}

std::string mock_scene(uint64_t h, std::string_view prompt) {
  std::string name = after_marker(prompt, "Location: ");
  auto theme = pick_word(h, 0x41, kThemeWords);
  auto mood = pick_word(h, 0x42, kMoodWords);
  auto object = pick_word(h, 0x43, kObjectWords);
  std::string out;
  out += "Intro: The travelers reach " + name + " as the light turns " +
         std::string(mood) + ", and the gate's hum rises to meet them.\n";
  out += "Development: Walking the grounds of " + name +
         ", they trade questions with its keepers and learn how the " +
         std::string(theme) + " was kept alive here through lean years.\n";
  out += "Climax: A sealed door demands the " + std::string(object) +
         " neither of them carries, and the era begins to close around " +
         name + " before the debt is paid.\n";
  out += "Ending: The keepers accept a recorded story in place of the " +
         std::string(object) + ", and the gate of " + name +
         " marks the travelers as friends of the lattice.\n";
  return out;
}

std::string mock_transition(uint64_t h, std::string_view prompt) {
  std::string from = after_marker(prompt, "From: ");
  std::string to = after_marker(prompt, "To: ");
  auto theme = pick_word(h, 0x61, kThemeWords);
  auto object = pick_word(h, 0x62, kObjectWords);
  std::string out;
  out += "The " + std::string(theme) + " that once moved between " + from +
         " and " + to + " moves again, and the travelers follow it. ";
  out += "At the threshold of " + from + " the " + std::string(object) +
         " warms in the chronicler's hand, recalling the year both sites "
         "answered the same bell. ";
  out += "They cross with their purpose unchanged, and " + to +
         " opens before them already half familiar.\n";
  return out;
}

}  // namespace

std::string MockProvider::complete(const CompletionRequest& request) {
  const std::string& prompt = request.prompt;
  uint64_t h = splitmix64(fnv1a64(prompt) ^ splitmix64(seed_));
  if (contains(prompt, "exactly 12 comma-separated integers")) {
    return mock_survey(h);
  }
  if (contains(prompt, "**Event Logic**: [score]")) {
    return mock_judge(h);
  }
  if (contains(prompt, "### Attraction A: ")) {
    return mock_relevance(h, prompt);
  }
  if (contains(prompt, "### Source document: ")) {
    return mock_doc_summary(h, prompt);
  }
  if (contains(prompt, "### Leads")) {
    return mock_exposition(h, prompt);
  }
  if (contains(prompt, "### Connection")) {
    return mock_transition(h, prompt);
  }
  if (contains(prompt, "Intro: <how")) {
    return mock_scene(h, prompt);
  }
  if (contains(prompt, "Title: <one line>")) {
    return mock_worldview(h, prompt);
  }
  if (contains(prompt, "Name: <name>")) {
    return mock_characters(h);
  }
  return "Mock reply " + hex64(h) + "\n";
}

HttpProvider::HttpProvider(HttpProviderConfig config)
    : config_(std::move(config)) {
  const std::string& ep = config_.endpoint;
  std::size_t scheme = ep.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("provider endpoint must include a scheme: " + ep);
  }
  std::size_t path_start = ep.find('/', scheme + 3);
  if (path_start == std::string::npos) {
    host_ = ep;
    path_ = "/";
  } else {
    host_ = ep.substr(0, path_start);
    path_ = ep.substr(path_start);
  }
}

std::string HttpProvider::complete(const CompletionRequest& request) {
  nlohmann::json body;
  body["model"] = request.model.empty() ? config_.model : request.model;
  body["prompt"] = request.prompt;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_ms * attempt));
    }
    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error contacting " + host_;
      continue;
    }
    if (res->status >= 500) {
      last_error = "provider returned status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProviderError("provider returned status " +
                          std::to_string(res->status) + " for " + host_ + path_);
    }
    try {
      auto reply = nlohmann::json::parse(res->body);
      if (!reply.contains("completion")) {
        throw ProviderError("provider reply missing \"completion\" field");
      }
      return reply.at("completion").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("provider reply is not valid JSON: ") +
                          e.what());
    }
  }
  throw ProviderError("provider unavailable after " +
                      std::to_string(config_.retries + 1) + " attempts: " +
                      last_error);
}

}  // namespace tw
