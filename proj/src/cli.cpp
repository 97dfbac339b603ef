#include "tw/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <set>

#include "json.hpp"

#include "tw/ingest.hpp"
#include "tw/judge.hpp"
#include "tw/planio.hpp"
#include "tw/prompts.hpp"

namespace tw {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void require(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string(what));
}

json ratio_json(const Ratio& r) {
  return {{"num", r.num}, {"den", r.den}, {"percent", r.percent()}};
}

void print_metrics(std::ostream& out, const AggregateMetrics& m) {
  out << "delivery: " << m.delivery.percent() << "\n";
  out << "commonsense micro: " << m.cs_micro.percent() << "\n";
  out << "commonsense macro: " << m.cs_macro.percent() << "\n";
  out << "hard micro: " << m.hard_micro.percent() << "\n";
  out << "hard macro: " << m.hard_macro.percent() << "\n";
  out << "final pass: " << m.final_pass.percent() << "\n";
}

json metrics_json(const AggregateMetrics& m) {
  return {{"delivery", ratio_json(m.delivery)},
          {"commonsense_micro", ratio_json(m.cs_micro)},
          {"commonsense_macro", ratio_json(m.cs_macro)},
          {"hard_micro", ratio_json(m.hard_micro)},
          {"hard_macro", ratio_json(m.hard_macro)},
          {"final_pass", ratio_json(m.final_pass)}};
}

std::string constraint_report_json(const ConstraintReport& report) {
  json j;
  j["delivered"] = report.delivered;
  j["results"] = json::array();
  for (const ConstraintResult& r : report.results) {
    j["results"].push_back(
        {{"id", r.id},
         {"category", std::string(constraint_category_name(r.category))},
         {"passed", r.passed}});
  }
  j["commonsense_passed"] = report.passed_count(ConstraintCategory::Commonsense);
  j["commonsense_total"] = report.total_count(ConstraintCategory::Commonsense);
  j["hard_passed"] = report.passed_count(ConstraintCategory::Hard);
  j["hard_total"] = report.total_count(ConstraintCategory::Hard);
  return j.dump(2) + "\n";
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<QueryParams>& queries,
                    uint64_t prompts_fingerprint) {
  json m = json::parse(config_to_json_text(cfg));
  m["command"] = command;
  m["prompts_fingerprint"] = hex64(prompts_fingerprint);
  if (queries.size() == 1) {
    m["query"] = json::parse(queries[0].to_json_text());
  } else if (!queries.empty()) {
    m["queries"] = json::array();
    for (const QueryParams& q : queries) {
      m["queries"].push_back(json::parse(q.to_json_text()));
    }
  }
  write_text_file(cfg.out_dir + "/manifest.json", m.dump(2) + "\n");
}

PromptLibrary load_prompts(const RunConfig& cfg) {
  return cfg.prompts_dir.empty() ? PromptLibrary::builtin()
                                 : PromptLibrary::load(cfg.prompts_dir);
}

EngineOptions engine_options(const RunConfig& cfg) {
  EngineOptions opts;
  opts.retries = cfg.provider.retries;
  opts.in_flight = cfg.provider.in_flight;
  opts.model = cfg.provider.model;
  opts.temperature = cfg.provider.temperature;
  return opts;
}

std::string attraction_info_text(const KnowledgeGraph& graph,
                                 const std::vector<std::string>& sequence) {
  std::string info;
  std::set<std::string> seen;
  for (const std::string& id : sequence) {
    if (!seen.insert(id).second) continue;
    if (!graph.has_node(id)) continue;
    const AttractionNode& n = graph.node(id);
    info += "### " + n.name + "\n";
    info += "Historical Background: " + n.historical_background + "\n";
    info += "Cultural Significance: " + n.cultural_significance + "\n";
    info += "Historical Stories: " + n.historical_stories + "\n";
    info += "Main Attractions: " + n.main_attractions + "\n";
    info += "Geographical Location: " + n.geographical_location + "\n\n";
  }
  return info;
}

}  // namespace

std::string_view eval_mode_name(EvalMode mode) {
  return mode == EvalMode::Serial ? "serial" : "parallel";
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "serial") return EvalMode::Serial;
  if (name == "parallel") return EvalMode::Parallel;
  throw ConfigError("unknown eval mode: " + std::string(name));
}

RunConfig config_from_json_text(std::string_view text,
                                const std::string& origin, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    if (j.contains("graph")) base.graph = j["graph"].get<std::string>();
    if (j.contains("docs_dir")) base.docs_dir = j["docs_dir"].get<std::string>();
    if (j.contains("manual_edges")) {
      base.manual_edges = j["manual_edges"].get<std::string>();
    }
    if (j.contains("prompts_dir")) {
      base.prompts_dir = j["prompts_dir"].get<std::string>();
    }
    if (j.contains("provider")) {
      const json& p = j["provider"];
      if (p.contains("kind")) base.provider.kind = p["kind"].get<std::string>();
      if (p.contains("endpoint")) {
        base.provider.endpoint = p["endpoint"].get<std::string>();
      }
      if (p.contains("model")) {
        base.provider.model = p["model"].get<std::string>();
      }
      if (p.contains("key_env")) {
        base.provider.key_env = p["key_env"].get<std::string>();
      }
      if (p.contains("temperature")) {
        base.provider.temperature = p["temperature"].get<double>();
      }
      if (p.contains("in_flight")) {
        base.provider.in_flight = p["in_flight"].get<int>();
      }
      if (p.contains("retries")) {
        base.provider.retries = p["retries"].get<int>();
      }
    }
    if (j.contains("ga")) {
      const json& g = j["ga"];
      if (g.contains("pop_num")) base.ga.pop_num = g["pop_num"].get<int>();
      if (g.contains("p_m")) base.ga.p_m = g["p_m"].get<double>();
      if (g.contains("p_z")) base.ga.p_z = g["p_z"].get<double>();
      if (g.contains("max_generations")) {
        base.ga.max_generations = g["max_generations"].get<int>();
      }
      if (g.contains("tournament_size")) {
        base.ga.tournament_size = g["tournament_size"].get<int>();
      }
      if (g.contains("seed")) base.ga.seed = g["seed"].get<uint64_t>();
      if (g.contains("days")) base.ga.days = g["days"].get<int>();
      if (g.contains("eval_mode")) {
        base.ga.eval_mode = parse_eval_mode(g["eval_mode"].get<std::string>());
      }
      if (g.contains("weights")) {
        const json& w = g["weights"];
        if (!w.is_array() || w.size() != 3) {
          throw ParseError(origin + ": ga.weights must be [w1, w2, w3]");
        }
        base.ga.weights.w1 = w[0].get<double>();
        base.ga.weights.w2 = w[1].get<double>();
        base.ga.weights.w3 = w[2].get<double>();
      }
    }
    if (j.contains("disabled_constraints")) {
      base.disabled_constraints.clear();
      for (const json& c : j["disabled_constraints"]) {
        base.disabled_constraints.push_back(c.get<std::string>());
      }
    }
    if (j.contains("out_dir")) base.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("query_file")) {
      base.query_file = j["query_file"].get<std::string>();
    }
    if (j.contains("query_index")) {
      base.query_index = j["query_index"].get<int>();
    }
    if (j.contains("plan")) base.plan_path = j["plan"].get<std::string>();
    if (j.contains("plans")) {
      base.plan_paths.clear();
      for (const json& p : j["plans"]) {
        base.plan_paths.push_back(p.get<std::string>());
      }
    }
    if (j.contains("judge")) base.judge = j["judge"].get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return base;
}

void apply_patch(RunConfig& cfg, const RunConfigPatch& patch) {
  if (patch.graph) cfg.graph = *patch.graph;
  if (patch.docs_dir) cfg.docs_dir = *patch.docs_dir;
  if (patch.manual_edges) cfg.manual_edges = *patch.manual_edges;
  if (patch.prompts_dir) cfg.prompts_dir = *patch.prompts_dir;
  if (patch.provider_kind) cfg.provider.kind = *patch.provider_kind;
  if (patch.endpoint) cfg.provider.endpoint = *patch.endpoint;
  if (patch.model) cfg.provider.model = *patch.model;
  if (patch.key_env) cfg.provider.key_env = *patch.key_env;
  if (patch.temperature) cfg.provider.temperature = *patch.temperature;
  if (patch.in_flight) cfg.provider.in_flight = *patch.in_flight;
  if (patch.retries) cfg.provider.retries = *patch.retries;
  if (patch.pop_num) cfg.ga.pop_num = *patch.pop_num;
  if (patch.p_m) cfg.ga.p_m = *patch.p_m;
  if (patch.p_z) cfg.ga.p_z = *patch.p_z;
  if (patch.generations) cfg.ga.max_generations = *patch.generations;
  if (patch.days) cfg.ga.days = *patch.days;
  if (patch.seed) cfg.ga.seed = *patch.seed;
  if (patch.eval_mode) cfg.ga.eval_mode = parse_eval_mode(*patch.eval_mode);
  if (patch.w1) cfg.ga.weights.w1 = *patch.w1;
  if (patch.w2) cfg.ga.weights.w2 = *patch.w2;
  if (patch.w3) cfg.ga.weights.w3 = *patch.w3;
  if (patch.disabled_constraints) {
    cfg.disabled_constraints = *patch.disabled_constraints;
  }
  if (patch.out_dir) cfg.out_dir = *patch.out_dir;
  if (patch.query_file) cfg.query_file = *patch.query_file;
  if (patch.query_index) cfg.query_index = *patch.query_index;
  if (patch.plan_path) cfg.plan_path = *patch.plan_path;
  if (patch.plan_paths) cfg.plan_paths = *patch.plan_paths;
  if (patch.judge) cfg.judge = *patch.judge;
}

RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const RunConfigPatch& patch) {
  RunConfig cfg;
  if (config_path.has_value()) {
    cfg = config_from_json_text(read_text_file(*config_path), *config_path,
                                std::move(cfg));
  }
  apply_patch(cfg, patch);
  return cfg;
}

std::string config_to_json_text(const RunConfig& cfg) {
  json j;
  j["format_version"] = 1;
  j["graph"] = cfg.graph;
  j["docs_dir"] = cfg.docs_dir;
  j["manual_edges"] = cfg.manual_edges;
  j["prompts_dir"] = cfg.prompts_dir;
  j["provider"] = {{"kind", cfg.provider.kind},
                   {"endpoint", cfg.provider.endpoint},
                   {"model", cfg.provider.model},
                   {"key_env", cfg.provider.key_env},
                   {"temperature", cfg.provider.temperature},
                   {"in_flight", cfg.provider.in_flight},
                   {"retries", cfg.provider.retries}};
  j["ga"] = {{"pop_num", cfg.ga.pop_num},
             {"p_m", cfg.ga.p_m},
             {"p_z", cfg.ga.p_z},
             {"max_generations", cfg.ga.max_generations},
             {"tournament_size", cfg.ga.tournament_size},
             {"seed", cfg.ga.seed},
             {"days", cfg.ga.days},
             {"eval_mode", std::string(eval_mode_name(cfg.ga.eval_mode))},
             {"weights",
              {cfg.ga.weights.w1, cfg.ga.weights.w2, cfg.ga.weights.w3}}};
  j["disabled_constraints"] = cfg.disabled_constraints;
  j["out_dir"] = cfg.out_dir;
  j["query_file"] = cfg.query_file;
  j["query_index"] = cfg.query_index;
  j["plan"] = cfg.plan_path;
  j["plans"] = cfg.plan_paths;
  j["judge"] = cfg.judge;
  return j.dump(2) + "\n";
}

std::unique_ptr<TextProvider> make_provider(const ProviderConfig& cfg,
                                            uint64_t seed) {
  if (cfg.kind == "mock") return std::make_unique<MockProvider>(seed);
  if (cfg.kind == "http") {
    if (cfg.endpoint.empty()) {
      throw ConfigError("http provider needs an endpoint");
    }
    HttpProviderConfig h;
    h.endpoint = cfg.endpoint;
    h.model = cfg.model;
    const char* key = std::getenv(cfg.key_env.c_str());
    h.api_key = key == nullptr ? "" : key;
    h.retries = cfg.retries;
    return std::make_unique<HttpProvider>(std::move(h));
  }
  throw ConfigError("unknown provider kind: " + cfg.kind);
}

int cmd_build_graph(const RunConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  try {
    require(cfg.docs_dir, "build-graph needs a docs directory");
    require(cfg.graph, "build-graph needs an output graph path");
    std::unique_ptr<TextProvider> provider =
        make_provider(cfg.provider, cfg.ga.seed);
    IngestOptions iopts;
    iopts.retries = cfg.provider.retries;
    iopts.in_flight = cfg.provider.in_flight;
    std::optional<std::string> manual;
    if (!cfg.manual_edges.empty()) manual = cfg.manual_edges;
    KnowledgeGraph graph =
        ingest_attractions(cfg.docs_dir, *provider, iopts, manual);
    graph.save(cfg.graph);
    out << "nodes: " << graph.nodes().size() << "\n";
    out << "edges: " << graph.edges().size() << "\n";
    out << "graph: " << cfg.graph << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    require(cfg.graph, "plan needs a graph file");
    KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph);
    QueryParams query;
    query.name = "adhoc";
    query.days = cfg.ga.days;
    if (!cfg.query_file.empty()) {
      std::vector<QueryParams> queries = load_queries(cfg.query_file);
      if (cfg.query_index < 0 ||
          cfg.query_index >= static_cast<int>(queries.size())) {
        throw ConfigError("query index " + std::to_string(cfg.query_index) +
                          " out of range (" + std::to_string(queries.size()) +
                          " queries)");
      }
      query = queries[cfg.query_index];
    }
    RunConfig effective = cfg;
    effective.ga.days = query.days;
    effective.ga.validate();
    std::vector<ConstraintDef> defs =
        filter_constraints(builtin_constraint_set(), cfg.disabled_constraints);
    RegionLayout layout = RegionLayout::from_graph(graph);
    PromptLibrary prompts = load_prompts(cfg);
    fs::create_directories(cfg.out_dir);
    write_manifest(effective, "plan", {query}, prompts.fingerprint());
    std::unique_ptr<TextProvider> provider =
        make_provider(cfg.provider, effective.ga.seed);
    NarrativeEngine engine(graph, *provider, prompts, engine_options(cfg));
    EngineSmoothness smoothness(engine);
    ConstraintSet cset{defs, query};
    EvalContext ctx{graph, layout, cset, effective.ga.weights};
    RunResult result = run(effective.ga, ctx, smoothness);
    ItineraryPlan plan = decode(result.best.genome, graph);
    PlanFile pf;
    pf.plan = plan;
    pf.genome = result.best.genome;
    pf.fitness = result.best.report;
    pf.seed = effective.ga.seed;
    save_plan(pf, cfg.out_dir + "/best_plan.json");
    write_text_file(cfg.out_dir + "/history.csv", history_csv(result.history));
    ConstraintReport creport = evaluate_plan(plan, query, graph, defs);
    write_text_file(cfg.out_dir + "/constraints.json",
                    constraint_report_json(creport));
    out << "best total: " << fmt("%.9g", result.best.report.total) << "\n";
    out << "violations: hard=" << result.best.report.hard_violations
        << " commonsense=" << result.best.report.commonsense_violations
        << "\n";
    out << "travel time (h): " << fmt("%.3f", total_travel_hours(plan, graph))
        << "\n";
    out << "artifacts: " << cfg.out_dir << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_script(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    require(cfg.graph, "script needs a graph file");
    require(cfg.plan_path, "script needs a plan file");
    KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph);
    PlanFile pf = load_plan(cfg.plan_path);
    PromptLibrary prompts = load_prompts(cfg);
    fs::create_directories(cfg.out_dir);
    write_manifest(cfg, "script", {}, prompts.fingerprint());
    std::unique_ptr<TextProvider> provider =
        make_provider(cfg.provider, cfg.ga.seed);
    NarrativeEngine engine(graph, *provider, prompts, engine_options(cfg));
    ScriptBundle bundle = engine.assemble(pf.plan.sequence);
    std::string text = render_script_text(bundle, graph);
    write_text_file(cfg.out_dir + "/script.txt", text);
    out << "scenes: " << bundle.scene_units.size() << "\n";
    out << "transitions: " << bundle.transitions.size() << "\n";
    out << "script: " << cfg.out_dir << "/script.txt\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    require(cfg.graph, "evaluate needs a graph file");
    require(cfg.query_file, "evaluate needs a query file");
    if (cfg.plan_paths.empty()) {
      throw ConfigError("evaluate needs at least one plan file");
    }
    KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph);
    std::vector<QueryParams> queries = load_queries(cfg.query_file);
    if (cfg.plan_paths.size() != queries.size()) {
      throw ConfigError("plan count " + std::to_string(cfg.plan_paths.size()) +
                        " does not match query count " +
                        std::to_string(queries.size()));
    }
    std::vector<ConstraintDef> defs =
        filter_constraints(builtin_constraint_set(), cfg.disabled_constraints);
    std::vector<PlanFile> plans;
    std::vector<ConstraintReport> reports;
    for (std::size_t i = 0; i < cfg.plan_paths.size(); ++i) {
      plans.push_back(load_plan(cfg.plan_paths[i]));
      reports.push_back(
          evaluate_plan(plans.back().plan, queries[i], graph, defs));
    }
    AggregateMetrics metrics = aggregate(reports);
    fs::create_directories(cfg.out_dir);
    PromptLibrary prompts = load_prompts(cfg);
    write_manifest(cfg, "evaluate", queries, prompts.fingerprint());
    write_text_file(cfg.out_dir + "/metrics.json",
                    metrics_json(metrics).dump(2) + "\n");
    print_metrics(out, metrics);
    if (cfg.judge) {
      std::unique_ptr<TextProvider> provider =
          make_provider(cfg.provider, cfg.ga.seed);
      NarrativeEngine engine(graph, *provider, prompts, engine_options(cfg));
      std::string csv = quality_csv_header();
      for (std::size_t i = 0; i < plans.size(); ++i) {
        ScriptBundle bundle = engine.assemble(plans[i].plan.sequence);
        std::string script_text = render_script_text(bundle, graph);
        std::string info = attraction_info_text(graph, plans[i].plan.sequence);
        JudgeOutcome outcome =
            judge_script(script_text, info, prompts, *provider, {},
                         cfg.provider.model, cfg.provider.retries);
        std::string city = queries[i].destination.empty()
                               ? queries[i].name
                               : queries[i].destination;
        csv += quality_csv_row(city, cfg.provider.model, outcome.report);
      }
      write_text_file(cfg.out_dir + "/quality.csv", csv);
      out << "quality: " << cfg.out_dir << "/quality.csv\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    require(cfg.graph, "bench needs a graph file");
    require(cfg.query_file, "bench needs a query file");
    KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph);
    std::vector<QueryParams> queries = load_queries(cfg.query_file);
    std::vector<ConstraintDef> defs =
        filter_constraints(builtin_constraint_set(), cfg.disabled_constraints);
    RegionLayout layout = RegionLayout::from_graph(graph);
    PromptLibrary prompts = load_prompts(cfg);
    fs::create_directories(cfg.out_dir);
    write_manifest(cfg, "bench", queries, prompts.fingerprint());
    std::unique_ptr<TextProvider> provider =
        make_provider(cfg.provider, cfg.ga.seed);
    NarrativeEngine engine(graph, *provider, prompts, engine_options(cfg));
    EngineSmoothness smoothness(engine);
    std::vector<ConstraintReport> reports;
    int delivered = 0;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const QueryParams& query = queries[qi];
      GaConfig ga = cfg.ga;
      ga.days = query.days;
      ga.seed = derive_seed(cfg.ga.seed, qi, 0);
      try {
        ga.validate();
        ConstraintSet cset{defs, query};
        EvalContext ctx{graph, layout, cset, ga.weights};
        RunResult result = run(ga, ctx, smoothness);
        ItineraryPlan plan = decode(result.best.genome, graph);
        PlanFile pf;
        pf.plan = plan;
        pf.genome = result.best.genome;
        pf.fitness = result.best.report;
        pf.seed = ga.seed;
        save_plan(pf, cfg.out_dir + "/plan_q" + std::to_string(qi) + ".json");
        reports.push_back(evaluate_plan(plan, query, graph, defs));
        ++delivered;
      } catch (const Error& e) {
        err << "query " << qi << " undelivered: " << e.what() << "\n";
        reports.push_back(ConstraintReport::undelivered(defs));
      }
    }
    AggregateMetrics metrics = aggregate(reports);
    json report;
    report["queries"] = queries.size();
    report["delivered"] = delivered;
    report["metrics"] = metrics_json(metrics);
    write_text_file(cfg.out_dir + "/bench_report.json",
                    report.dump(2) + "\n");
    out << "queries: " << queries.size() << "\n";
    out << "delivered: " << delivered << "\n";
    print_metrics(out, metrics);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tw
