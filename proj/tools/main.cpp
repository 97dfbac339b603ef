#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tw/cli.hpp"

namespace {

struct CliState {
  std::optional<std::string> config;
  tw::RunConfigPatch patch;
  std::vector<std::string> disabled;
  std::vector<std::string> plans;
  bool judge = false;
  int (*command)(const tw::RunConfig&, std::ostream&, std::ostream&) = nullptr;
};

void add_common(CLI::App* cmd, CliState& s) {
  cmd->add_option("--config", s.config, "JSON config file; flags override it");
  cmd->add_option("--graph", s.patch.graph, "knowledge graph file");
  cmd->add_option("--prompts", s.patch.prompts_dir,
                  "prompt template directory (default: built-in templates)");
  cmd->add_option("--provider", s.patch.provider_kind,
                  "provider kind: mock or http");
  cmd->add_option("--endpoint", s.patch.endpoint, "http provider endpoint");
  cmd->add_option("--model", s.patch.model, "model name");
  cmd->add_option("--key-env", s.patch.key_env,
                  "environment variable holding the API key");
  cmd->add_option("--temperature", s.patch.temperature, "sampling temperature");
  cmd->add_option("--in-flight", s.patch.in_flight,
                  "max concurrent provider calls");
  cmd->add_option("--retries", s.patch.retries, "provider retry budget");
  cmd->add_option("--seed", s.patch.seed, "run seed");
  cmd->add_option("--out", s.patch.out_dir, "output directory");
}

void add_ga(CLI::App* cmd, CliState& s) {
  cmd->add_option("--pop", s.patch.pop_num, "population size");
  cmd->add_option("--gens", s.patch.generations, "generation budget");
  cmd->add_option("--days", s.patch.days, "trip length in days");
  cmd->add_option("--pm", s.patch.p_m, "per-region mutation probability");
  cmd->add_option("--pz", s.patch.p_z, "slot zeroing probability");
  cmd->add_option("--w1", s.patch.w1, "smoothness weight");
  cmd->add_option("--w2", s.patch.w2, "travel-time weight");
  cmd->add_option("--w3", s.patch.w3, "popularity weight");
  cmd->add_option("--eval-mode", s.patch.eval_mode,
                  "fitness evaluation mode: serial or parallel");
  cmd->add_option("--disable", s.disabled,
                  "constraint id to disable (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"travel itinerary optimizer with narrative scripts"};
  app.require_subcommand(1);
  CliState s;

  CLI::App* build = app.add_subcommand(
      "build-graph", "ingest attraction documents into a knowledge graph");
  add_common(build, s);
  build->add_option("--docs", s.patch.docs_dir,
                    "directory of attraction documents");
  build->add_option("--manual-edges", s.patch.manual_edges,
                    "manual edge override file");
  build->callback([&s] { s.command = tw::cmd_build_graph; });

  CLI::App* plan =
      app.add_subcommand("plan", "optimize an itinerary for one query");
  add_common(plan, s);
  add_ga(plan, s);
  plan->add_option("--query-file", s.patch.query_file, "query set file");
  plan->add_option("--query-index", s.patch.query_index,
                   "which query in the file to plan for");
  plan->callback([&s] { s.command = tw::cmd_plan; });

  CLI::App* script = app.add_subcommand(
      "script", "render the full narrative script for a saved plan");
  add_common(script, s);
  script->add_option("--plan", s.patch.plan_path, "plan file to script");
  script->callback([&s] { s.command = tw::cmd_script; });

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "grade saved plans against their queries");
  add_common(evaluate, s);
  evaluate->add_option("--plans", s.plans, "plan files, one per query");
  evaluate->add_option("--query-file", s.patch.query_file, "query set file");
  evaluate->add_option("--disable", s.disabled,
                       "constraint id to disable (repeatable)");
  evaluate->add_flag("--judge", s.judge, "also judge each script's quality");
  evaluate->callback([&s] { s.command = tw::cmd_evaluate; });

  CLI::App* bench = app.add_subcommand(
      "bench", "plan every query in a set and aggregate the metrics");
  add_common(bench, s);
  add_ga(bench, s);
  bench->add_option("--query-file", s.patch.query_file, "query set file");
  bench->callback([&s] { s.command = tw::cmd_bench; });

  CLI11_PARSE(app, argc, argv);

  if (!s.disabled.empty()) s.patch.disabled_constraints = s.disabled;
  if (!s.plans.empty()) s.patch.plan_paths = s.plans;
  if (s.judge) s.patch.judge = true;

  try {
    tw::RunConfig cfg = tw::resolve_config(s.config, s.patch);
    return s.command(cfg, std::cout, std::cerr);
  } catch (const tw::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
