#include "tw/judge.hpp"

#include <cstdio>

namespace tw {

namespace {

// Number following "**<label>**:" with optional brackets around the score.
std::optional<double> find_label_score(std::string_view text,
                                       std::string_view label) {
  std::string needle = "**" + std::string(label) + "**";
  std::size_t pos = text.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  std::size_t colon = text.find(':', pos + needle.size());
  if (colon == std::string_view::npos) {
    throw ParseError("judge reply: no score after label " + std::string(label));
  }
  std::size_t eol = text.find('\n', colon);
  if (eol == std::string_view::npos) eol = text.size();
  std::string token = trim(text.substr(colon + 1, eol - colon - 1));
  while (!token.empty() && (token.front() == '[' || token.front() == '*')) {
    token.erase(token.begin());
  }
  while (!token.empty() && (token.back() == ']' || token.back() == '*')) {
    token.pop_back();
  }
  token = trim(token);
  if (token.empty()) {
    throw ParseError("judge reply: empty score for label " +
                     std::string(label));
  }
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw ParseError("judge reply: score for " + std::string(label) +
                     " is not a number: \"" + token + "\"");
  }
  if (consumed != token.size()) {
    throw ParseError("judge reply: score for " + std::string(label) +
                     " is not a number: \"" + token + "\"");
  }
  if (value < 0.0 || value > 10.0) {
    throw ParseError("judge reply: score for " + std::string(label) +
                     " is outside [0,10]: " + token);
  }
  return value;
}

double require_label(std::string_view text, std::string_view label) {
  std::optional<double> value = find_label_score(text, label);
  if (!value.has_value()) {
    throw ParseError("judge reply: missing label " + std::string(label));
  }
  return *value;
}

void append_score_line(std::string& out, std::string_view label,
                       double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  out += "- **" + std::string(label) + "**: " + buf + "\n";
}

}  // namespace

double length_factor(std::size_t char_count) {
  if (char_count < 1500) return 0.7;
  if (char_count <= 7000) return 1.0;
  return 1.2;
}

DimensionScores dimension_scores(const RubricScores& scores, double factor,
                                 const DimensionWeights& weights) {
  DimensionScores dims;
  dims.nc = factor * weights.nc *
            (0.4 * scores.event_logic + 0.4 * scores.attraction_relevance +
             0.2 * scores.transition_smoothness);
  double metaphorical;
  if (scores.metaphorical_dialogue.has_value()) {
    metaphorical = *scores.metaphorical_dialogue;
  } else {
    metaphorical =
        (scores.dialogue_authenticity + scores.cultural_driven_actions) / 2.0;
    dims.ci_derived = true;
  }
  dims.ci = factor * weights.ci *
            (0.3 * scores.dialogue_authenticity +
             0.4 * scores.cultural_driven_actions + 0.3 * metaphorical);
  dims.sc = factor * weights.sc *
            (0.6 * scores.spatiotemporal_corridor +
             0.4 * scores.route_rationality);
  dims.cf = factor * weights.cf *
            (0.5 * scores.cultural_depth +
             0.5 * scores.multi_dimensional_linkage);
  return dims;
}

QualityReport overall(const DimensionScores& dims, double factor,
                      std::size_t char_count) {
  QualityReport report;
  report.nc = dims.nc;
  report.ci = dims.ci;
  report.sc = dims.sc;
  report.cf = dims.cf;
  report.overall = dims.nc + dims.ci + dims.sc + dims.cf;
  report.length_factor = factor;
  report.char_count = char_count;
  report.ci_derived = dims.ci_derived;
  return report;
}

RubricScores parse_judge_output(std::string_view text) {
  RubricScores scores;
  scores.event_logic = require_label(text, "Event Logic");
  scores.attraction_relevance = require_label(text, "Attraction Relevance");
  scores.transition_smoothness = require_label(text, "Transition Smoothness");
  scores.dialogue_authenticity = require_label(text, "Dialogue Authenticity");
  scores.cultural_driven_actions =
      require_label(text, "Cultural-Driven Actions");
  scores.metaphorical_dialogue =
      find_label_score(text, "Metaphorical Dialogue");
  scores.spatiotemporal_corridor =
      require_label(text, "Spatiotemporal Corridor");
  scores.route_rationality = require_label(text, "Route Rationality");
  scores.cultural_depth = require_label(text, "Cultural Depth");
  scores.multi_dimensional_linkage =
      require_label(text, "Multi-Dimensional Linkage");
  return scores;
}

std::string render_judge_output(const RubricScores& scores) {
  std::string out;
  out += "1. **Plot Coherence**\n";
  append_score_line(out, "Event Logic", scores.event_logic);
  append_score_line(out, "Attraction Relevance", scores.attraction_relevance);
  append_score_line(out, "Transition Smoothness",
                    scores.transition_smoothness);
  out += "\n2. **Character Interaction**\n";
  append_score_line(out, "Dialogue Authenticity",
                    scores.dialogue_authenticity);
  append_score_line(out, "Cultural-Driven Actions",
                    scores.cultural_driven_actions);
  if (scores.metaphorical_dialogue.has_value()) {
    append_score_line(out, "Metaphorical Dialogue",
                      *scores.metaphorical_dialogue);
  }
  out += "\n3. **Time and Space Coherence**\n";
  append_score_line(out, "Spatiotemporal Corridor",
                    scores.spatiotemporal_corridor);
  append_score_line(out, "Route Rationality", scores.route_rationality);
  out += "\n4. **Cultural Fit**\n";
  append_score_line(out, "Cultural Depth", scores.cultural_depth);
  append_score_line(out, "Multi-Dimensional Linkage",
                    scores.multi_dimensional_linkage);
  return out;
}

QualityReport score_script(std::string_view script, const RubricScores& scores,
                           const DimensionWeights& weights) {
  std::size_t chars = utf8_length(script);
  double factor = length_factor(chars);
  return overall(dimension_scores(scores, factor, weights), factor, chars);
}

JudgeOutcome judge_script(const std::string& script,
                          const std::string& attraction_info,
                          const PromptLibrary& prompts, TextProvider& provider,
                          const DimensionWeights& weights,
                          const std::string& model, int retries) {
  std::string prompt = render_template(prompts.text(PromptKind::Judge),
                                       {{"attraction_info", attraction_info},
                                        {"script_content", script}});
  CompletionRequest req;
  req.model = model;
  req.prompt = prompt;
  req.temperature = 0.0;
  for (int attempt = 0;; ++attempt) {
    std::string reply;
    try {
      reply = provider.complete(req);
    } catch (const ProviderError&) {
      if (attempt >= retries) throw;
      continue;
    }
    try {
      JudgeOutcome outcome;
      outcome.scores = parse_judge_output(reply);
      outcome.report = score_script(script, outcome.scores, weights);
      return outcome;
    } catch (const ParseError&) {
      if (attempt >= retries) throw;
    }
  }
}

std::string quality_csv_header() {
  return "city,model,nc,ci,sc,cf,overall,factor,chars\n";
}

std::string quality_csv_row(const std::string& city, const std::string& model,
                            const QualityReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.1f,%zu\n",
                city.c_str(), model.c_str(), report.nc, report.ci, report.sc,
                report.cf, report.overall, report.length_factor,
                report.char_count);
  return std::string(buf);
}

}  // namespace tw
