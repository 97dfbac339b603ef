#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tw/evolve.hpp"
#include "tw/provider.hpp"

namespace tw {

std::string_view eval_mode_name(EvalMode mode);
EvalMode parse_eval_mode(std::string_view name);

struct ProviderConfig {
  std::string kind = "mock";  // "mock" or "http"
  std::string endpoint;
  std::string model = "mock-model";
  // Name of the environment variable holding the API key. Only the name is
  // recorded anywhere; the value never leaves the environment.
  std::string key_env = "PROVIDER_KEY";
  double temperature = 0.7;
  int in_flight = 4;
  int retries = 2;
};

struct RunConfig {
  std::string graph;
  std::string docs_dir;
  std::string manual_edges;
  std::string prompts_dir;  // empty: built-in templates
  ProviderConfig provider;
  GaConfig ga;
  std::vector<std::string> disabled_constraints;
  std::string out_dir = "out";
  // When a query file is set its day count overrides ga.days for planning.
  std::string query_file;
  int query_index = 0;
  std::string plan_path;
  std::vector<std::string> plan_paths;
  bool judge = false;
};

// Flag-level overrides. A set field beats the config file, which beats the
// built-in defaults.
struct RunConfigPatch {
  std::optional<std::string> graph;
  std::optional<std::string> docs_dir;
  std::optional<std::string> manual_edges;
  std::optional<std::string> prompts_dir;
  std::optional<std::string> provider_kind;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> key_env;
  std::optional<double> temperature;
  std::optional<int> in_flight;
  std::optional<int> retries;
  std::optional<int> pop_num;
  std::optional<double> p_m;
  std::optional<double> p_z;
  std::optional<int> generations;
  std::optional<int> days;
  std::optional<uint64_t> seed;
  std::optional<std::string> eval_mode;
  std::optional<double> w1;
  std::optional<double> w2;
  std::optional<double> w3;
  std::optional<std::vector<std::string>> disabled_constraints;
  std::optional<std::string> out_dir;
  std::optional<std::string> query_file;
  std::optional<int> query_index;
  std::optional<std::string> plan_path;
  std::optional<std::vector<std::string>> plan_paths;
  std::optional<bool> judge;
};

// Overlays JSON config onto `base`. Unknown keys are ignored, so a manifest
// written by config_to_json_text reloads as-is.
RunConfig config_from_json_text(std::string_view text,
                                const std::string& origin,
                                RunConfig base = {});
void apply_patch(RunConfig& cfg, const RunConfigPatch& patch);
RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const RunConfigPatch& patch);

// The effective config as reloadable JSON; manifest files embed this verbatim.
std::string config_to_json_text(const RunConfig& cfg);

std::unique_ptr<TextProvider> make_provider(const ProviderConfig& cfg,
                                            uint64_t seed);

// Each command returns its exit status: 0 iff the primary artifact was
// produced, regardless of constraint pass or fail. All artifacts land under
// cfg.out_dir except the graph file cmd_build_graph writes to cfg.graph.
int cmd_build_graph(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_plan(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_script(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace tw
