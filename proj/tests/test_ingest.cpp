#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "doctest.h"
#include "tw/common.hpp"
#include "tw/ingest.hpp"
#include "tw/kgraph.hpp"
#include "tw/provider.hpp"

using namespace tw;

namespace {

const std::string kDocsDir =
    std::string(TW_FIXTURES_DIR) + "/toycity/attractions";
const std::string kManualEdges =
    std::string(TW_FIXTURES_DIR) + "/toycity/edges.manual";

std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("tw_ingest_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
}

// Throws for prompts the predicate selects, a configurable number of times
// per distinct prompt; everything else goes to the wrapped provider.
class FlakyProvider : public TextProvider {
 public:
  FlakyProvider(TextProvider& inner,
                std::function<bool(const std::string&)> should_fail,
                int failures_per_prompt = 1000000)
      : inner_(inner),
        should_fail_(std::move(should_fail)),
        failures_per_prompt_(failures_per_prompt) {}

  std::string complete(const CompletionRequest& request) override {
    if (should_fail_(request.prompt)) {
      std::lock_guard<std::mutex> lock(mutex_);
      int& seen = seen_[request.prompt];
      if (seen < failures_per_prompt_) {
        ++seen;
        throw ProviderError("synthetic outage");
      }
    }
    return inner_.complete(request);
  }
  std::string name() const override { return "flaky"; }

 private:
  TextProvider& inner_;
  std::function<bool(const std::string&)> should_fail_;
  int failures_per_prompt_;
  std::mutex mutex_;
  std::map<std::string, int> seen_;
};

}  // namespace

TEST_CASE("four-document ingest fills every node from its header and summary") {
  MockProvider provider(5);
  KnowledgeGraph g =
      ingest_attractions(kDocsDir, provider, {}, kManualEdges);

  REQUIRE(g.nodes().size() == 4);
  const AttractionNode& tower = g.node("harbor_light");
  CHECK(tower.name == "Harbor Light Tower");
  CHECK(tower.latitude == doctest::Approx(43.688));
  CHECK(tower.longitude == doctest::Approx(7.291));
  CHECK(tower.ticket_price == doctest::Approx(6.0));
  CHECK(tower.popularity == doctest::Approx(9400.0));

  // No Ticket line in this document; the price defaults to zero.
  CHECK(g.node("pepper_stair").ticket_price == doctest::Approx(0.0));
  CHECK(g.node("pepper_stair").popularity == doctest::Approx(4100.0));

  for (const AttractionNode& node : g.nodes()) {
    CHECK(!node.historical_background.empty());
    CHECK(!node.cultural_significance.empty());
    CHECK(!node.historical_stories.empty());
    CHECK(!node.main_attractions.empty());
    CHECK(!node.geographical_location.empty());
    CHECK(!node.incomplete);
  }
}

TEST_CASE("ingest is byte-identical across runs under the mock provider") {
  MockProvider a(5);
  MockProvider b(5);
  std::string first =
      ingest_attractions(kDocsDir, a, {}, kManualEdges).to_json_text();
  std::string second =
      ingest_attractions(kDocsDir, b, {}, kManualEdges).to_json_text();
  CHECK(first == second);
  CHECK(first.find("Harbor Light Tower") != std::string::npos);
}

TEST_CASE("manual edges override proposals and append missing pairs") {
  auto dir = fresh_dir("override");
  // One line per unordered pair, so every edge in the result is manual.
  write_file(dir / "all.manual",
             "anchor_chapel|harbor_light|9.9|link ah\n"
             "anchor_chapel|mirror_gate|9.9|link am\n"
             "anchor_chapel|pepper_stair|9.9|link ap\n"
             "harbor_light|mirror_gate|9.9|link hm\n"
             "harbor_light|pepper_stair|9.9|link hp\n"
             "mirror_gate|pepper_stair|9.9|link mp\n");
  MockProvider provider(5);
  KnowledgeGraph g =
      ingest_attractions(kDocsDir, provider, {}, (dir / "all.manual").string());
  CHECK(g.edges().size() == 6);
  for (const CulturalEdge& e : g.edges()) {
    CHECK(e.travel_time_hours == doctest::Approx(9.9));
    CHECK(e.relevance.rfind("link ", 0) == 0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("manual edge endpoint order does not matter") {
  auto dir = fresh_dir("reversed");
  write_file(dir / "rev.manual",
             "mirror_gate|harbor_light|0.7|reversed pair\n"
             "anchor_chapel|harbor_light|0.3|tree\n"
             "mirror_gate|pepper_stair|0.5|tree\n");
  MockProvider provider(5);
  KnowledgeGraph g =
      ingest_attractions(kDocsDir, provider, {}, (dir / "rev.manual").string());
  CHECK(g.travel_time("harbor_light", "mirror_gate") == doctest::Approx(0.7));
  CHECK(g.travel_time("mirror_gate", "harbor_light") == doctest::Approx(0.7));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a single document yields a one-node graph") {
  auto dir = fresh_dir("single");
  std::filesystem::copy_file(kDocsDir + "/harbor_light.txt",
                             dir / "harbor_light.txt");
  MockProvider provider(5);
  KnowledgeGraph g = ingest_attractions(dir.string(), provider);
  CHECK(g.nodes().size() == 1);
  CHECK(g.edges().empty());
  CHECK(g.node("harbor_light").name == "Harbor Light Tower");
  std::filesystem::remove_all(dir);
}

TEST_CASE("two documents plus a manual edge give two nodes and one edge") {
  auto dir = fresh_dir("pairdocs");
  std::filesystem::copy_file(kDocsDir + "/harbor_light.txt",
                             dir / "harbor_light.txt");
  std::filesystem::copy_file(kDocsDir + "/mirror_gate.txt",
                             dir / "mirror_gate.txt");
  write_file(dir / "pair.manual", "harbor_light|mirror_gate|0.4|shipped\n");
  MockProvider provider(5);
  KnowledgeGraph g = ingest_attractions(dir.string(), provider, {},
                                        (dir / "pair.manual").string());
  CHECK(g.nodes().size() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.travel_time("harbor_light", "mirror_gate") == doctest::Approx(0.4));
  std::filesystem::remove_all(dir);
}

TEST_CASE("an empty docs directory is rejected") {
  auto dir = fresh_dir("nodocs");
  write_file(dir / "notes.md", "not an attraction document");
  MockProvider provider(5);
  CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider),
                       doctest::Contains("no attraction documents"),
                       ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("header errors name the offending file and line kind") {
  auto dir = fresh_dir("badheader");
  MockProvider provider(5);

  SUBCASE("missing name") {
    write_file(dir / "nameless.txt", "Coordinates: 1.0, 2.0\n\nBody.\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider),
                         doctest::Contains("needs a Name line"), ParseError);
  }
  SUBCASE("missing coordinates") {
    write_file(dir / "lost.txt", "Name: Lost Site\n\nBody.\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider),
                         doctest::Contains("needs a Coordinates line"),
                         ParseError);
  }
  SUBCASE("malformed coordinates") {
    write_file(dir / "odd.txt", "Name: Odd\nCoordinates: 1.0\n\nBody.\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider),
                         doctest::Contains("Coordinates must be"), ParseError);
  }
  SUBCASE("non-numeric coordinates") {
    write_file(dir / "foggy.txt",
               "Name: Foggy\nCoordinates: north, east\n\nBody.\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider),
                         doctest::Contains("not numeric"), ParseError);
  }
  SUBCASE("non-numeric ticket") {
    write_file(dir / "pricey.txt",
               "Name: Pricey\nCoordinates: 1.0, 2.0\nTicket: free\n\nBody.\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider),
                         doctest::Contains("Ticket is not numeric"),
                         ParseError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("manual edge file errors carry path and line number") {
  auto dir = fresh_dir("badmanual");
  std::filesystem::copy_file(kDocsDir + "/harbor_light.txt",
                             dir / "harbor_light.txt");
  std::filesystem::copy_file(kDocsDir + "/mirror_gate.txt",
                             dir / "mirror_gate.txt");
  MockProvider provider(5);

  SUBCASE("wrong field count") {
    write_file(dir / "short.manual", "# comment\n\nharbor_light|mirror_gate\n");
    CHECK_THROWS_WITH_AS(
        ingest_attractions(dir.string(), provider, {},
                           (dir / "short.manual").string()),
        doctest::Contains("short.manual:3: expected a|b|hours|relevance"),
        ParseError);
  }
  SUBCASE("non-numeric hours") {
    write_file(dir / "slow.manual", "harbor_light|mirror_gate|soon|link\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider, {},
                                            (dir / "slow.manual").string()),
                         doctest::Contains("hours not numeric"), ParseError);
  }
  SUBCASE("unknown endpoint fails validation") {
    write_file(dir / "ghost.manual",
               "harbor_light|mirror_gate|0.4|link\n"
               "harbor_light|ghost_pier|0.2|link\n");
    CHECK_THROWS_WITH_AS(ingest_attractions(dir.string(), provider, {},
                                            (dir / "ghost.manual").string()),
                         doctest::Contains("unknown endpoint ghost_pier"),
                         ValidationError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary failures after retries list every failed attraction") {
  MockProvider mock(5);
  FlakyProvider provider(mock, [](const std::string& prompt) {
    return contains(prompt, "### Source document: ") &&
           (contains(prompt, "Mirror Gate") || contains(prompt, "Pepper Stair"));
  });
  IngestOptions opts;
  opts.retries = 1;
  CHECK_THROWS_WITH_AS(
      ingest_attractions(kDocsDir, provider, opts, kManualEdges),
      doctest::Contains("ingestion failed for: mirror_gate, pepper_stair"),
      ProviderError);
}

TEST_CASE("relevance failures after retries name the pair") {
  MockProvider mock(5);
  FlakyProvider provider(mock, [](const std::string& prompt) {
    return contains(prompt, "### Attraction A: Harbor Light Tower") &&
           contains(prompt, "### Attraction B: Mirror Gate");
  });
  IngestOptions opts;
  opts.retries = 0;
  CHECK_THROWS_WITH_AS(
      ingest_attractions(kDocsDir, provider, opts, kManualEdges),
      doctest::Contains("ingestion failed for: harbor_light|mirror_gate"),
      ProviderError);
}

TEST_CASE("transient provider failures are retried to success") {
  MockProvider mock(5);
  // Each summary prompt fails twice; with two retries every call recovers.
  FlakyProvider provider(
      mock,
      [](const std::string& prompt) {
        return contains(prompt, "### Source document: ");
      },
      2);
  IngestOptions opts;
  opts.retries = 2;
  KnowledgeGraph g = ingest_attractions(kDocsDir, provider, opts, kManualEdges);
  CHECK(g.nodes().size() == 4);

  MockProvider fresh(5);
  KnowledgeGraph clean =
      ingest_attractions(kDocsDir, fresh, {}, kManualEdges);
  CHECK(g.to_json_text() == clean.to_json_text());
}
