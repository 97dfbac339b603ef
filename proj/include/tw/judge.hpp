#pragma once

#include <optional>
#include <string>

#include "tw/common.hpp"
#include "tw/prompts.hpp"
#include "tw/provider.hpp"

namespace tw {

// Ten sub-criteria, 0-10 each. A two-criterion judge reply leaves
// metaphorical_dialogue empty; the dimension math then substitutes the mean
// of the other two character scores and flags the report.
struct RubricScores {
  double event_logic = 0.0;
  double attraction_relevance = 0.0;
  double transition_smoothness = 0.0;
  double dialogue_authenticity = 0.0;
  double cultural_driven_actions = 0.0;
  std::optional<double> metaphorical_dialogue;
  double spatiotemporal_corridor = 0.0;
  double route_rationality = 0.0;
  double cultural_depth = 0.0;
  double multi_dimensional_linkage = 0.0;
};

// Optional per-dimension multipliers; 1.0 leaves the rubric untouched.
struct DimensionWeights {
  double nc = 1.0;
  double ci = 1.0;
  double sc = 1.0;
  double cf = 1.0;
};

struct DimensionScores {
  double nc = 0.0;
  double ci = 0.0;
  double sc = 0.0;
  double cf = 0.0;
  bool ci_derived = false;
};

struct QualityReport {
  double nc = 0.0;
  double ci = 0.0;
  double sc = 0.0;
  double cf = 0.0;
  double overall = 0.0;
  double length_factor = 1.0;
  std::size_t char_count = 0;
  bool ci_derived = false;
};

// 0.7 under 1500 characters, 1.0 through 7000, 1.2 above.
double length_factor(std::size_t char_count);

// Weighted sub-criteria per dimension, each scaled by the length factor and
// the dimension multiplier.
DimensionScores dimension_scores(const RubricScores& scores, double factor,
                                 const DimensionWeights& weights = {});

// Assembles the report; overall is the plain sum of the four dimensions.
QualityReport overall(const DimensionScores& dims, double factor,
                      std::size_t char_count);

// Labeled-line extraction from the judge's bracketed-score format. Throws
// ParseError naming the first missing, non-numeric, or out-of-range label.
RubricScores parse_judge_output(std::string_view text);

std::string render_judge_output(const RubricScores& scores);

// Factor from the script's codepoint count, then dimensions and overall.
QualityReport score_script(std::string_view script, const RubricScores& scores,
                           const DimensionWeights& weights = {});

struct JudgeOutcome {
  RubricScores scores;
  QualityReport report;
};

// Full judge pass over one script text via the provider.
JudgeOutcome judge_script(const std::string& script,
                          const std::string& attraction_info,
                          const PromptLibrary& prompts, TextProvider& provider,
                          const DimensionWeights& weights = {},
                          const std::string& model = "mock-model",
                          int retries = 2);

std::string quality_csv_header();
std::string quality_csv_row(const std::string& city, const std::string& model,
                            const QualityReport& report);

}  // namespace tw
