#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "tw/common.hpp"
#include "tw/provider.hpp"

using namespace tw;

namespace {

std::string ask(TextProvider& p, const std::string& prompt) {
  CompletionRequest req;
  req.model = "test-model";
  req.prompt = prompt;
  return p.complete(req);
}

}  // namespace

TEST_CASE("mock provider is a pure function of seed and prompt") {
  MockProvider a(7);
  MockProvider b(7);
  MockProvider c(8);
  const std::string prompt = "Location: Old Harbor\nIntro: <how the story opens>";
  std::string first = ask(a, prompt);
  CHECK(first == ask(a, prompt));
  CHECK(first == ask(b, prompt));
  CHECK(first != ask(c, prompt));
  CHECK(first != ask(a, prompt + " "));
}

TEST_CASE("mock survey replies are 12 comma-separated integers in 1..5") {
  MockProvider p(3);
  std::string reply = ask(
      p, "Rate the passage. Reply with exactly 12 comma-separated integers.");
  std::vector<std::string> tokens = split(reply, ',');
  REQUIRE(tokens.size() == 12);
  for (const std::string& t : tokens) {
    int v = std::stoi(trim(t));
    CHECK(v >= 1);
    CHECK(v <= 5);
  }
}

TEST_CASE("mock judge replies carry all nine rubric labels with 0..10 scores") {
  MockProvider p(3);
  std::string reply =
      ask(p, "Score the script.\n- **Event Logic**: [score]\n");
  const char* labels[] = {
      "**Event Logic**",          "**Attraction Relevance**",
      "**Transition Smoothness**", "**Dialogue Authenticity**",
      "**Cultural-Driven Actions**", "**Spatiotemporal Corridor**",
      "**Route Rationality**",    "**Cultural Depth**",
      "**Multi-Dimensional Linkage**"};
  for (const char* label : labels) {
    bool found = false;
    std::string value =
        extract_labeled_line(reply, std::string("- ") + label, &found);
    REQUIRE_MESSAGE(found, label);
    int v = std::stoi(value);
    CHECK(v >= 0);
    CHECK(v <= 10);
  }
}

TEST_CASE("mock relevance verdicts echo both names and skew toward yes") {
  MockProvider p(11);
  int yes = 0;
  int no = 0;
  for (int i = 0; i < 300; ++i) {
    std::string a = "Site" + std::to_string(i);
    std::string b = "Peer" + std::to_string(i);
    std::string reply = ask(p, "### Attraction A: " + a +
                                   "\n### Attraction B: " + b +
                                   "\nConnection: yes/no\nRelevance:");
    if (contains(reply, "Connection: yes")) {
      ++yes;
      CHECK(contains(reply, a));
      CHECK(contains(reply, b));
      CHECK(contains(reply, "Relevance: "));
    } else {
      ++no;
      CHECK(contains(reply, "Connection: no"));
    }
  }
  CHECK(yes + no == 300);
  // Expected yes rate 2/3; wide margins keep the check stable across seeds.
  CHECK(yes > 150);
  CHECK(no > 50);
}

TEST_CASE("mock document summaries fill the five requested attributes") {
  MockProvider p(5);
  std::string reply = ask(p, "### Source document: Old Fort\n\nBody text.");
  const char* labels[] = {"Historical Background", "Cultural Significance",
                          "Historical Stories", "Main Attractions",
                          "Geographical Location"};
  for (const char* label : labels) {
    bool found = false;
    CHECK(!extract_labeled_line(reply, label, &found).empty());
    CHECK(found);
  }
  CHECK(contains(reply, "Old Fort"));
}

TEST_CASE("mock worldview weaves every listed attraction into the background") {
  MockProvider p(5);
  std::string prompt =
      "### Attractions\n- Old Harbor (harbor)\n- Tide Fort (fort)\n"
      "- Glass Market (market)\n### Task\nTitle: <one line>\n";
  std::string reply = ask(p, prompt);
  bool found = false;
  CHECK(!extract_labeled_line(reply, "Title", &found).empty());
  CHECK(found);
  extract_labeled_line(reply, "Background", &found);
  CHECK(found);
  CHECK(contains(reply, "World Rules:"));
  CHECK(contains(reply, "Old Harbor"));
  CHECK(contains(reply, "Tide Fort"));
  CHECK(contains(reply, "Glass Market"));
}

TEST_CASE("mock characters use the fixed lead names") {
  MockProvider p(5);
  std::string reply = ask(p, "Write both sheets.\nName: <name>\n");
  CHECK(contains(reply, "Name: Traveler-01"));
  CHECK(contains(reply, "Name: Guide-01"));
  bool found = false;
  extract_labeled_line(reply, "Identity", &found);
  CHECK(found);
  extract_labeled_line(reply, "Backstory", &found);
  CHECK(found);
}

TEST_CASE("mock exposition mentions both leads") {
  MockProvider p(5);
  std::string reply = ask(
      p, "### Leads\nTraveler: Lin Yi\nGuide: Murong Yun\n### Task\nOpen.");
  CHECK(contains(reply, "Lin Yi"));
  CHECK(contains(reply, "Murong Yun"));
}

TEST_CASE("mock scenes emit all four act markers around the location name") {
  MockProvider p(5);
  std::string reply =
      ask(p, "Location: Saline Abbey\nIntro: <how the story opens>");
  for (const char* label : {"Intro", "Development", "Climax", "Ending"}) {
    bool found = false;
    std::string value = extract_labeled_line(reply, label, &found);
    REQUIRE_MESSAGE(found, label);
    CHECK(contains(value, "Saline Abbey"));
  }
}

TEST_CASE("mock transitions reference both endpoints") {
  MockProvider p(5);
  std::string reply = ask(
      p, "### Connection\nFrom: Old Harbor\nTo: Tide Fort\nRelevance: shared");
  CHECK(contains(reply, "Old Harbor"));
  CHECK(contains(reply, "Tide Fort"));
}

TEST_CASE("mock survey marker outranks other template markers") {
  MockProvider p(5);
  std::string reply = ask(p,
                          "### Attraction A: X\n### Attraction B: Y\n"
                          "Reply with exactly 12 comma-separated integers.");
  CHECK(split(reply, ',').size() == 12);
}

TEST_CASE("mock falls back to a generic reply for unknown prompts") {
  MockProvider p(5);
  std::string reply = ask(p, "Say anything.");
  CHECK(contains(reply, "Mock reply "));
}

TEST_CASE("counting provider forwards replies and tallies calls") {
  MockProvider inner(5);
  CountingProvider counter(inner);
  CHECK(counter.calls() == 0);
  CHECK(counter.name() == "mock");
  std::string direct = ask(inner, "Say anything.");
  CHECK(ask(counter, "Say anything.") == direct);
  ask(counter, "Say more.");
  CHECK(counter.calls() == 2);
  counter.reset();
  CHECK(counter.calls() == 0);
}

TEST_CASE("http provider rejects endpoints without a scheme") {
  HttpProviderConfig cfg;
  cfg.endpoint = "localhost:8080/complete";
  CHECK_THROWS_WITH_AS(HttpProvider{cfg},
                       doctest::Contains("must include a scheme"), ConfigError);
}

namespace {

struct LocalServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  LocalServer() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    thread.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port) + "/complete";
  }
};

}  // namespace

TEST_CASE("http provider posts the request fields and returns the completion") {
  LocalServer local;
  std::string seen_auth;
  nlohmann::json seen_body;
  local.server.Post("/complete", [&](const httplib::Request& req,
                                     httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    res.set_content(R"({"completion": "a quiet reply"})", "application/json");
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  cfg.model = "fallback-model";
  cfg.api_key = "sk-test";
  HttpProvider provider(cfg);

  CompletionRequest req;
  req.model = "wire-model";
  req.prompt = "hello";
  req.temperature = 0.25;
  req.max_tokens = 64;
  CHECK(provider.complete(req) == "a quiet reply");
  CHECK(seen_auth == "Bearer sk-test");
  CHECK(seen_body.at("model") == "wire-model");
  CHECK(seen_body.at("prompt") == "hello");
  CHECK(seen_body.at("temperature").get<double>() == doctest::Approx(0.25));
  CHECK(seen_body.at("max_tokens") == 64);
}

TEST_CASE("http provider falls back to the configured model when unset") {
  LocalServer local;
  nlohmann::json seen_body;
  local.server.Post("/complete", [&](const httplib::Request& req,
                                     httplib::Response& res) {
    seen_body = nlohmann::json::parse(req.body);
    res.set_content(R"({"completion": "ok"})", "application/json");
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  cfg.model = "fallback-model";
  HttpProvider provider(cfg);

  CompletionRequest req;
  req.prompt = "hello";
  CHECK(provider.complete(req) == "ok");
  CHECK(seen_body.at("model") == "fallback-model");
}

TEST_CASE("http provider retries 5xx responses until one succeeds") {
  LocalServer local;
  std::atomic<int> hits{0};
  local.server.Post("/complete", [&](const httplib::Request&,
                                     httplib::Response& res) {
    if (hits.fetch_add(1) == 0) {
      res.status = 500;
      res.set_content("overloaded", "text/plain");
    } else {
      res.set_content(R"({"completion": "second try"})", "application/json");
    }
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  cfg.retries = 2;
  cfg.backoff_ms = 1;
  HttpProvider provider(cfg);
  CompletionRequest req;
  req.prompt = "hello";
  CHECK(provider.complete(req) == "second try");
  CHECK(hits.load() == 2);
}

TEST_CASE("http provider gives up after exhausting retries on 5xx") {
  LocalServer local;
  std::atomic<int> hits{0};
  local.server.Post("/complete", [&](const httplib::Request&,
                                     httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 503;
    res.set_content("down", "text/plain");
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  cfg.retries = 1;
  cfg.backoff_ms = 1;
  HttpProvider provider(cfg);
  CompletionRequest req;
  req.prompt = "hello";
  CHECK_THROWS_WITH_AS(provider.complete(req),
                       doctest::Contains("unavailable after 2 attempts"),
                       ProviderError);
  CHECK(hits.load() == 2);
}

TEST_CASE("http provider fails 4xx immediately without retrying") {
  LocalServer local;
  std::atomic<int> hits{0};
  local.server.Post("/complete", [&](const httplib::Request&,
                                     httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 404;
    res.set_content("no such route", "text/plain");
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  cfg.retries = 3;
  cfg.backoff_ms = 1;
  HttpProvider provider(cfg);
  CompletionRequest req;
  req.prompt = "hello";
  CHECK_THROWS_WITH_AS(provider.complete(req), doctest::Contains("404"),
                       ProviderError);
  CHECK(hits.load() == 1);
}

TEST_CASE("http provider rejects replies without a completion field") {
  LocalServer local;
  local.server.Post("/complete", [&](const httplib::Request&,
                                     httplib::Response& res) {
    res.set_content(R"({"text": "wrong shape"})", "application/json");
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  HttpProvider provider(cfg);
  CompletionRequest req;
  req.prompt = "hello";
  CHECK_THROWS_WITH_AS(provider.complete(req),
                       doctest::Contains("missing \"completion\""),
                       ProviderError);
}

TEST_CASE("http provider rejects non-JSON replies") {
  LocalServer local;
  local.server.Post("/complete", [&](const httplib::Request&,
                                     httplib::Response& res) {
    res.set_content("plain text", "text/plain");
  });

  HttpProviderConfig cfg;
  cfg.endpoint = local.endpoint();
  HttpProvider provider(cfg);
  CompletionRequest req;
  req.prompt = "hello";
  CHECK_THROWS_WITH_AS(provider.complete(req),
                       doctest::Contains("not valid JSON"), ProviderError);
}
