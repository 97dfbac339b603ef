#pragma once

#include <array>
#include <atomic>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tw/kgraph.hpp"
#include "tw/prompts.hpp"
#include "tw/provider.hpp"

namespace tw {

struct Worldview {
  std::string title;
  std::string background;
  std::string world_rules;
  // Provider reply, verbatim; downstream prompts embed this text.
  std::string raw;
};

struct UserCharacter {
  std::string name;
  std::string identity;
  std::string personality;
  std::string backstory;
};

struct GuideCharacter {
  std::string name;
  std::string identity;
  std::string expertise;
  std::string purpose;
};

struct CharacterSet {
  UserCharacter user;
  GuideCharacter guide;
  std::string raw;
};

// One four-act scene anchored at an attraction.
struct SceneUnit {
  std::string attraction_id;
  std::string intro;
  std::string development;
  std::string climax;
  std::string ending;
};

struct SmoothnessSurvey {
  std::array<int, 12> answers{};
  double mean() const;
};

struct TransitionScript {
  std::string from_id;
  std::string to_id;
  std::string text;
  // Mean of `survey` when scored normally; the configured floor when the
  // survey never parsed (fallback_scored set, survey absent).
  std::optional<double> smoothness;
  std::optional<SmoothnessSurvey> survey;
  bool fallback_scored = false;
};

struct ScriptBundle {
  Worldview worldview;
  CharacterSet characters;
  std::string exposition;
  std::vector<std::string> itinerary;
  std::map<std::string, SceneUnit> scene_units;
  // One per adjacent itinerary pair with distinct endpoints, in visit order.
  std::vector<TransitionScript> transitions;
};

struct EngineOptions {
  int retries = 2;
  int in_flight = 4;
  double neutral_smoothness = 3.0;
  double fallback_smoothness = 1.0;
  std::string model = "mock-model";
  double temperature = 0.7;
  int max_tokens = 2048;
};

Worldview parse_worldview(std::string_view reply);
CharacterSet parse_characters(std::string_view reply);
SceneUnit parse_scene_unit(std::string_view reply, std::string attraction_id);
SmoothnessSurvey parse_survey(std::string_view reply);

std::string render_character_sheet(const CharacterSet& characters);
std::string render_scene_text(const SceneUnit& scene);

Worldview generate_worldview(const KnowledgeGraph& graph,
                             const PromptLibrary& prompts,
                             TextProvider& provider,
                             const EngineOptions& opts = {});
CharacterSet generate_characters(const Worldview& worldview,
                                 const PromptLibrary& prompts,
                                 TextProvider& provider,
                                 const EngineOptions& opts = {});
std::string generate_exposition(const Worldview& worldview,
                                const CharacterSet& characters,
                                const PromptLibrary& prompts,
                                TextProvider& provider,
                                const EngineOptions& opts = {});
SceneUnit generate_scene_unit(const KnowledgeGraph& graph,
                              const std::string& attraction_id,
                              const Worldview& worldview,
                              const CharacterSet& characters,
                              const PromptLibrary& prompts,
                              TextProvider& provider,
                              const EngineOptions& opts = {});
TransitionScript generate_transition(const SceneUnit& from_scene,
                                     const SceneUnit& to_scene,
                                     const KnowledgeGraph& graph,
                                     const PromptLibrary& prompts,
                                     TextProvider& provider,
                                     const EngineOptions& opts = {});

// Scores `transition` in place: survey parsed from the provider reply, its
// mean stored as smoothness. Survey parse failures are retried; when the
// retry budget runs out the transition keeps the fallback floor and no
// survey, and nullopt comes back. Provider failures propagate after retries.
std::optional<SmoothnessSurvey> score_transition(const SceneUnit& prev_scene,
                                                 TransitionScript& transition,
                                                 const SceneUnit& next_scene,
                                                 const PromptLibrary& prompts,
                                                 TextProvider& provider,
                                                 const EngineOptions& opts = {});

// Mean transition smoothness of a bundle; `neutral` when the itinerary has
// fewer than two stops. Throws when any transition is unscored.
double smoothness_of_itinerary(const ScriptBundle& bundle,
                               double neutral = 3.0);

// Owns the generated narrative state for one worldview: lazy worldview,
// characters, exposition, scene units, and an ordered-pair transition memo.
// Distinct pairs and scenes may generate concurrently up to the in-flight
// limit; a pair already generating is waited on, never regenerated.
class NarrativeEngine {
 public:
  NarrativeEngine(const KnowledgeGraph& graph, TextProvider& provider,
                  PromptLibrary prompts, EngineOptions opts = {});

  const Worldview& worldview();
  const CharacterSet& characters();
  const std::string& exposition();
  const SceneUnit& scene_unit(const std::string& attraction_id);
  void prepare_all_scenes();

  // Generates and scores every pair not yet in the memo.
  void ensure_scored(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  // Memoized transition; generates and scores on first use.
  TransitionScript transition(const std::string& from, const std::string& to);

  // Smoothness of an already requested pair; blocks on an in-flight pair and
  // throws when the pair was never requested.
  double smoothness(const std::string& from, const std::string& to) const;

  std::size_t scored_pair_count() const;

  ScriptBundle assemble(const std::vector<std::string>& itinerary);

  const KnowledgeGraph& graph() const { return graph_; }
  const EngineOptions& options() const { return opts_; }

 private:
  std::string pair_key(const std::string& from, const std::string& to);
  const TransitionScript& ensure_transition(const std::string& from,
                                            const std::string& to);
  void ensure_foundation();

  const KnowledgeGraph& graph_;
  TextProvider& provider_;
  PromptLibrary prompts_;
  EngineOptions opts_;

  std::once_flag worldview_once_;
  std::once_flag characters_once_;
  std::once_flag exposition_once_;
  Worldview worldview_;
  uint64_t worldview_hash_ = 0;
  CharacterSet characters_;
  std::string exposition_;

  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_future<SceneUnit>> scenes_;
  std::unordered_map<std::string, std::shared_future<TransitionScript>>
      transitions_;
  mutable std::atomic<std::size_t> scored_pairs_{0};
};

// Smoothness feed for the optimizer. get() never triggers generation; the
// optimizer batches all needed pairs through ensure() first.
class SmoothnessSource {
 public:
  virtual ~SmoothnessSource() = default;
  virtual void ensure(
      const std::vector<std::pair<std::string, std::string>>& pairs) = 0;
  virtual double get(const std::string& from, const std::string& to) const = 0;
  virtual std::size_t scored_count() const = 0;
};

class EngineSmoothness : public SmoothnessSource {
 public:
  explicit EngineSmoothness(NarrativeEngine& engine) : engine_(engine) {}
  void ensure(
      const std::vector<std::pair<std::string, std::string>>& pairs) override {
    engine_.ensure_scored(pairs);
  }
  double get(const std::string& from, const std::string& to) const override {
    return engine_.smoothness(from, to);
  }
  std::size_t scored_count() const override {
    return engine_.scored_pair_count();
  }

 private:
  NarrativeEngine& engine_;
};

// Fixed table of pair scores for tests and oracles.
class TableSmoothness : public SmoothnessSource {
 public:
  void set(const std::string& from, const std::string& to, double value);
  void ensure(
      const std::vector<std::pair<std::string, std::string>>& pairs) override;
  double get(const std::string& from, const std::string& to) const override;
  std::size_t scored_count() const override { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
};

}  // namespace tw
