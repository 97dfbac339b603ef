#include "tw/narrative.hpp"

#include <algorithm>
#include <set>

namespace tw {

namespace {

// Runs the provider with retries for transport failures and blank replies.
std::string complete_with_retry(TextProvider& provider,
                                const EngineOptions& opts,
                                const std::string& prompt, const char* what) {
  CompletionRequest req;
  req.model = opts.model;
  req.prompt = prompt;
  req.temperature = opts.temperature;
  req.max_tokens = opts.max_tokens;
  for (int attempt = 0;; ++attempt) {
    std::string reply;
    try {
      reply = provider.complete(req);
    } catch (const ProviderError&) {
      if (attempt >= opts.retries) throw;
      continue;
    }
    if (!trim(reply).empty()) return reply;
    if (attempt >= opts.retries) {
      throw GenerationError(std::string(what) +
                            ": provider returned empty output");
    }
  }
}

std::string attraction_bullets(const KnowledgeGraph& graph) {
  std::vector<std::string> lines;
  for (const AttractionNode& n : graph.nodes()) {
    std::string features =
        n.main_attractions.empty() ? n.cultural_significance : n.main_attractions;
    lines.push_back("- " + n.name + " (" + n.geographical_location +
                    "): " + features);
  }
  return join(lines, "\n");
}

}  // namespace

double SmoothnessSurvey::mean() const {
  int sum = 0;
  for (int a : answers) sum += a;
  return static_cast<double>(sum) / 12.0;
}

Worldview parse_worldview(std::string_view reply) {
  Worldview w;
  w.raw = std::string(reply);
  w.title = extract_labeled_line(reply, "Title");
  w.background = extract_section(reply, "Background:", {"World Rules:"});
  w.world_rules = extract_section(reply, "World Rules:", {});
  if (w.background.empty()) w.background = trim(reply);
  return w;
}

CharacterSet parse_characters(std::string_view reply) {
  std::size_t user_pos = reply.find("User Character");
  std::size_t guide_pos = reply.find("Guide Character");
  if (user_pos == std::string_view::npos) {
    throw ParseError("character reply: missing User Character section");
  }
  if (guide_pos == std::string_view::npos) {
    throw ParseError("character reply: missing Guide Character section");
  }
  std::string_view user_block = reply.substr(user_pos, guide_pos - user_pos);
  std::string_view guide_block = reply.substr(guide_pos);
  CharacterSet cs;
  cs.raw = std::string(reply);
  cs.user.name = extract_labeled_line(user_block, "Name");
  cs.user.identity = extract_labeled_line(user_block, "Identity");
  cs.user.personality = extract_labeled_line(user_block, "Personality");
  cs.user.backstory = extract_labeled_line(user_block, "Backstory");
  cs.guide.name = extract_labeled_line(guide_block, "Name");
  cs.guide.identity = extract_labeled_line(guide_block, "Identity");
  cs.guide.expertise = extract_labeled_line(guide_block, "Expertise");
  cs.guide.purpose = extract_labeled_line(guide_block, "Purpose");
  if (cs.user.name.empty()) {
    throw ParseError("character reply: user character has no Name");
  }
  if (cs.guide.name.empty()) {
    throw ParseError("character reply: guide character has no Name");
  }
  return cs;
}

SceneUnit parse_scene_unit(std::string_view reply, std::string attraction_id) {
  SceneUnit s;
  s.attraction_id = std::move(attraction_id);
  s.intro = extract_section(reply, "Intro:",
                            {"Development:", "Climax:", "Ending:"});
  s.development =
      extract_section(reply, "Development:", {"Climax:", "Ending:"});
  s.climax = extract_section(reply, "Climax:", {"Ending:"});
  s.ending = extract_section(reply, "Ending:", {});
  std::vector<std::string> absent;
  if (s.intro.empty()) absent.push_back("missing Intro");
  if (s.development.empty()) absent.push_back("missing Development");
  if (s.climax.empty()) absent.push_back("missing Climax");
  if (s.ending.empty()) absent.push_back("missing Ending");
  if (!absent.empty()) {
    throw ParseError("scene reply for " + s.attraction_id + ": " +
                     join(absent, "; "));
  }
  return s;
}

SmoothnessSurvey parse_survey(std::string_view reply) {
  std::vector<std::string> tokens = split(trim(reply), ',');
  if (tokens.size() != 12) {
    throw ParseError("expected 12 scores, got " +
                     std::to_string(tokens.size()));
  }
  SmoothnessSurvey survey;
  for (std::size_t i = 0; i < 12; ++i) {
    std::string t = trim(tokens[i]);
    std::size_t consumed = 0;
    int value = 0;
    try {
      value = std::stoi(t, &consumed);
    } catch (const std::exception&) {
      throw ParseError("survey token is not an integer: \"" + t + "\"");
    }
    if (consumed != t.size()) {
      throw ParseError("survey token is not an integer: \"" + t + "\"");
    }
    if (value < 1 || value > 5) {
      throw ParseError("survey score out of range [1,5]: " +
                       std::to_string(value));
    }
    survey.answers[i] = value;
  }
  return survey;
}

std::string render_character_sheet(const CharacterSet& characters) {
  std::string out;
  out += "User Character\n";
  out += "Name: " + characters.user.name + "\n";
  out += "Identity: " + characters.user.identity + "\n";
  out += "Personality: " + characters.user.personality + "\n";
  out += "Backstory: " + characters.user.backstory + "\n";
  out += "\nGuide Character\n";
  out += "Name: " + characters.guide.name + "\n";
  out += "Identity: " + characters.guide.identity + "\n";
  out += "Expertise: " + characters.guide.expertise + "\n";
  out += "Purpose: " + characters.guide.purpose + "\n";
  return out;
}

std::string render_scene_text(const SceneUnit& scene) {
  std::string out;
  out += "Intro: " + scene.intro + "\n";
  out += "Development: " + scene.development + "\n";
  out += "Climax: " + scene.climax + "\n";
  out += "Ending: " + scene.ending + "\n";
  return out;
}

Worldview generate_worldview(const KnowledgeGraph& graph,
                             const PromptLibrary& prompts,
                             TextProvider& provider,
                             const EngineOptions& opts) {
  if (graph.nodes().empty()) {
    throw ValidationError("worldview generation needs at least one attraction");
  }
  std::string prompt = render_template(
      prompts.text(PromptKind::Worldview),
      {{"attractions", attraction_bullets(graph)}});
  std::string reply =
      complete_with_retry(provider, opts, prompt, "worldview");
  return parse_worldview(reply);
}

CharacterSet generate_characters(const Worldview& worldview,
                                 const PromptLibrary& prompts,
                                 TextProvider& provider,
                                 const EngineOptions& opts) {
  if (trim(worldview.raw).empty()) {
    throw ValidationError("character generation needs a worldview");
  }
  std::string prompt = render_template(prompts.text(PromptKind::Characters),
                                       {{"worldview", worldview.raw}});
  std::string reply =
      complete_with_retry(provider, opts, prompt, "characters");
  return parse_characters(reply);
}

std::string generate_exposition(const Worldview& worldview,
                                const CharacterSet& characters,
                                const PromptLibrary& prompts,
                                TextProvider& provider,
                                const EngineOptions& opts) {
  if (trim(worldview.raw).empty()) {
    throw ValidationError("exposition generation needs a worldview");
  }
  std::string prompt = render_template(
      prompts.text(PromptKind::Exposition),
      {{"worldview", worldview.raw},
       {"user_name", characters.user.name},
       {"guide_name", characters.guide.name},
       {"characters", render_character_sheet(characters)}});
  return complete_with_retry(provider, opts, prompt, "exposition");
}

SceneUnit generate_scene_unit(const KnowledgeGraph& graph,
                              const std::string& attraction_id,
                              const Worldview& worldview,
                              const CharacterSet& characters,
                              const PromptLibrary& prompts,
                              TextProvider& provider,
                              const EngineOptions& opts) {
  const AttractionNode& node = graph.node(attraction_id);
  std::string prompt = render_template(
      prompts.text(PromptKind::Scene),
      {{"worldview", worldview.raw},
       {"characters", render_character_sheet(characters)},
       {"name", node.name},
       {"historical_background", node.historical_background},
       {"cultural_significance", node.cultural_significance},
       {"historical_stories", node.historical_stories},
       {"main_attractions", node.main_attractions},
       {"geographical_location", node.geographical_location}});
  std::string reply = complete_with_retry(provider, opts, prompt, "scene");
  return parse_scene_unit(reply, attraction_id);
}

TransitionScript generate_transition(const SceneUnit& from_scene,
                                     const SceneUnit& to_scene,
                                     const KnowledgeGraph& graph,
                                     const PromptLibrary& prompts,
                                     TextProvider& provider,
                                     const EngineOptions& opts) {
  if (from_scene.attraction_id == to_scene.attraction_id) {
    throw ValidationError("transition endpoints must differ: " +
                          from_scene.attraction_id);
  }
  const AttractionNode& from_node = graph.node(from_scene.attraction_id);
  const AttractionNode& to_node = graph.node(to_scene.attraction_id);
  const CulturalEdge* edge =
      graph.edge_between(from_node.id, to_node.id);
  std::string prompt = render_template(
      prompts.text(PromptKind::Transition),
      {{"from_name", from_node.name},
       {"to_name", to_node.name},
       {"from_script", render_scene_text(from_scene)},
       {"to_script", render_scene_text(to_scene)},
       {"relevance",
        edge && !edge->relevance.empty() ? edge->relevance
                                         : "(no recorded link)"}});
  TransitionScript t;
  t.from_id = from_node.id;
  t.to_id = to_node.id;
  t.text = complete_with_retry(provider, opts, prompt, "transition");
  return t;
}

std::optional<SmoothnessSurvey> score_transition(
    const SceneUnit& prev_scene, TransitionScript& transition,
    const SceneUnit& next_scene, const PromptLibrary& prompts,
    TextProvider& provider, const EngineOptions& opts) {
  if (transition.from_id != prev_scene.attraction_id ||
      transition.to_id != next_scene.attraction_id) {
    throw ValidationError("transition " + transition.from_id + "->" +
                          transition.to_id +
                          " does not connect the given scenes");
  }
  std::string prompt = render_template(
      prompts.text(PromptKind::Survey),
      {{"previous_script", render_scene_text(prev_scene)},
       {"transition_script", transition.text},
       {"next_script", render_scene_text(next_scene)}});
  CompletionRequest req;
  req.model = opts.model;
  req.prompt = prompt;
  req.temperature = opts.temperature;
  req.max_tokens = opts.max_tokens;
  for (int attempt = 0;; ++attempt) {
    std::string reply;
    try {
      reply = provider.complete(req);
    } catch (const ProviderError&) {
      if (attempt >= opts.retries) throw;
      continue;
    }
    try {
      SmoothnessSurvey survey = parse_survey(reply);
      transition.survey = survey;
      transition.smoothness = survey.mean();
      transition.fallback_scored = false;
      return survey;
    } catch (const ParseError&) {
      if (attempt >= opts.retries) {
        transition.survey.reset();
        transition.smoothness = opts.fallback_smoothness;
        transition.fallback_scored = true;
        return std::nullopt;
      }
    }
  }
}

double smoothness_of_itinerary(const ScriptBundle& bundle, double neutral) {
  if (bundle.transitions.empty()) return neutral;
  double sum = 0.0;
  for (const TransitionScript& t : bundle.transitions) {
    if (!t.smoothness.has_value()) {
      throw Error("unscored transition " + t.from_id + "->" + t.to_id);
    }
    sum += *t.smoothness;
  }
  return sum / static_cast<double>(bundle.transitions.size());
}

NarrativeEngine::NarrativeEngine(const KnowledgeGraph& graph,
                                 TextProvider& provider, PromptLibrary prompts,
                                 EngineOptions opts)
    : graph_(graph),
      provider_(provider),
      prompts_(std::move(prompts)),
      opts_(opts) {}

const Worldview& NarrativeEngine::worldview() {
  std::call_once(worldview_once_, [&]() {
    worldview_ = generate_worldview(graph_, prompts_, provider_, opts_);
    worldview_hash_ = fnv1a64(worldview_.raw);
  });
  return worldview_;
}

const CharacterSet& NarrativeEngine::characters() {
  std::call_once(characters_once_, [&]() {
    characters_ =
        generate_characters(worldview(), prompts_, provider_, opts_);
  });
  return characters_;
}

const std::string& NarrativeEngine::exposition() {
  std::call_once(exposition_once_, [&]() {
    exposition_ = generate_exposition(worldview(), characters(), prompts_,
                                      provider_, opts_);
  });
  return exposition_;
}

const SceneUnit& NarrativeEngine::scene_unit(const std::string& attraction_id) {
  ensure_foundation();
  std::shared_future<SceneUnit> future;
  bool owner = false;
  std::promise<SceneUnit> promise;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = scenes_.find(attraction_id);
    if (it != scenes_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      scenes_.emplace(attraction_id, future);
      owner = true;
    }
  }
  if (owner) {
    try {
      promise.set_value(generate_scene_unit(graph_, attraction_id, worldview_,
                                            characters_, prompts_, provider_,
                                            opts_));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard<std::mutex> lock(mutex_);
      scenes_.erase(attraction_id);
    }
  }
  return future.get();
}

void NarrativeEngine::prepare_all_scenes() {
  ensure_foundation();
  const auto& nodes = graph_.nodes();
  bounded_parallel_for(nodes.size(), opts_.in_flight,
                       [&](std::size_t i) { scene_unit(nodes[i].id); });
}

std::string NarrativeEngine::pair_key(const std::string& from,
                                      const std::string& to) {
  return hex64(worldview_hash_) + "|" + from + "|" + to;
}

const TransitionScript& NarrativeEngine::ensure_transition(
    const std::string& from, const std::string& to) {
  // Scenes first; they are memoized and may already be in flight elsewhere.
  const SceneUnit& prev = scene_unit(from);
  const SceneUnit& next = scene_unit(to);
  std::string key = pair_key(from, to);
  std::shared_future<TransitionScript> future;
  bool owner = false;
  std::promise<TransitionScript> promise;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = transitions_.find(key);
    if (it != transitions_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      transitions_.emplace(key, future);
      owner = true;
    }
  }
  if (owner) {
    try {
      TransitionScript t =
          generate_transition(prev, next, graph_, prompts_, provider_, opts_);
      score_transition(prev, t, next, prompts_, provider_, opts_);
      promise.set_value(std::move(t));
      scored_pairs_.fetch_add(1);
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard<std::mutex> lock(mutex_);
      transitions_.erase(key);
    }
  }
  return future.get();
}

void NarrativeEngine::ensure_foundation() {
  worldview();
  characters();
}

void NarrativeEngine::ensure_scored(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  ensure_foundation();
  std::set<std::pair<std::string, std::string>> distinct;
  for (const auto& p : pairs) {
    if (p.first == p.second) continue;
    distinct.insert(p);
  }
  std::vector<std::pair<std::string, std::string>> work(distinct.begin(),
                                                        distinct.end());
  // Scenes for every endpoint before transitions so the transition workers
  // mostly hit warm scene futures.
  std::set<std::string> ids;
  for (const auto& p : work) {
    ids.insert(p.first);
    ids.insert(p.second);
  }
  std::vector<std::string> id_list(ids.begin(), ids.end());
  bounded_parallel_for(id_list.size(), opts_.in_flight,
                       [&](std::size_t i) { scene_unit(id_list[i]); });
  bounded_parallel_for(work.size(), opts_.in_flight, [&](std::size_t i) {
    ensure_transition(work[i].first, work[i].second);
  });
}

TransitionScript NarrativeEngine::transition(const std::string& from,
                                             const std::string& to) {
  return ensure_transition(from, to);
}

double NarrativeEngine::smoothness(const std::string& from,
                                   const std::string& to) const {
  std::shared_future<TransitionScript> future;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string key =
        hex64(worldview_hash_) + "|" + from + "|" + to;
    auto it = transitions_.find(key);
    if (it == transitions_.end()) {
      throw Error("transition never requested: " + from + "->" + to);
    }
    future = it->second;
  }
  const TransitionScript& t = future.get();
  if (!t.smoothness.has_value()) {
    throw Error("transition unscored: " + from + "->" + to);
  }
  return *t.smoothness;
}

std::size_t NarrativeEngine::scored_pair_count() const {
  return scored_pairs_.load();
}

ScriptBundle NarrativeEngine::assemble(
    const std::vector<std::string>& itinerary) {
  if (itinerary.empty()) {
    throw ValidationError("cannot assemble a script for an empty itinerary");
  }
  ensure_foundation();
  ScriptBundle bundle;
  bundle.worldview = worldview();
  bundle.characters = characters();
  bundle.exposition = exposition();
  bundle.itinerary = itinerary;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i + 1 < itinerary.size(); ++i) {
    if (itinerary[i] == itinerary[i + 1]) continue;
    pairs.emplace_back(itinerary[i], itinerary[i + 1]);
  }
  ensure_scored(pairs);
  for (const std::string& id : itinerary) {
    bundle.scene_units[id] = scene_unit(id);
  }
  for (const auto& p : pairs) {
    bundle.transitions.push_back(ensure_transition(p.first, p.second));
  }
  return bundle;
}

void TableSmoothness::set(const std::string& from, const std::string& to,
                          double value) {
  table_[{from, to}] = value;
}

void TableSmoothness::ensure(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (const auto& p : pairs) {
    if (p.first == p.second) continue;
    if (table_.find(p) == table_.end()) {
      throw Error("smoothness table has no entry for " + p.first + "->" +
                  p.second);
    }
  }
}

double TableSmoothness::get(const std::string& from,
                            const std::string& to) const {
  auto it = table_.find({from, to});
  if (it == table_.end()) {
    throw Error("smoothness table has no entry for " + from + "->" + to);
  }
  return it->second;
}

}  // namespace tw
