#include "tw/planio.hpp"

#include "json.hpp"

namespace tw {

namespace {

using json = nlohmann::ordered_json;

std::string get_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return "";
  return j[key].get<std::string>();
}

}  // namespace

std::string plan_to_json_text(const PlanFile& file) {
  json j;
  j["format_version"] = 1;
  j["seed"] = file.seed;
  j["days"] = json::array();
  for (const DayPlan& day : file.plan.days) {
    json d;
    d["attractions"] = day.visits;
    d["commute"] = day.commute;
    d["breakfast"] = day.breakfast;
    d["lunch"] = day.lunch;
    d["dinner"] = day.dinner;
    d["accommodation"] = day.accommodation;
    d["scripts"] = day.script_hints;
    j["days"].push_back(std::move(d));
  }
  if (file.genome.has_value()) {
    j["genome"] = json::array();
    for (const DayGenome& day : file.genome->days) {
      j["genome"].push_back(join(
          std::vector<std::string>(day.slots.begin(), day.slots.end()), ","));
    }
  }
  if (file.fitness.has_value()) {
    const FitnessReport& f = *file.fitness;
    j["fitness"] = {{"f1", f.f1},
                    {"term2", f.term2},
                    {"term3", f.term3},
                    {"total", f.total},
                    {"hard_violations", f.hard_violations},
                    {"commonsense_violations", f.commonsense_violations}};
  }
  return j.dump(2) + "\n";
}

PlanFile plan_from_json_text(std::string_view text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    PlanFile file;
    if (j.contains("seed")) file.seed = j["seed"].get<uint64_t>();
    if (!j.contains("days") || !j["days"].is_array() || j["days"].empty()) {
      throw ParseError(origin + ": a plan needs a non-empty days array");
    }
    for (const json& d : j["days"]) {
      DayPlan day;
      if (d.contains("attractions")) {
        for (const json& a : d["attractions"]) {
          day.visits.push_back(a.get<std::string>());
        }
      }
      day.commute = get_string(d, "commute");
      day.breakfast = get_string(d, "breakfast");
      day.lunch = get_string(d, "lunch");
      day.dinner = get_string(d, "dinner");
      day.accommodation = get_string(d, "accommodation");
      if (d.contains("scripts")) {
        for (const json& s : d["scripts"]) {
          day.script_hints.push_back(s.get<std::string>());
        }
      } else {
        day.script_hints = day.visits;
      }
      for (const std::string& v : day.visits) {
        file.plan.sequence.push_back(v);
      }
      file.plan.days.push_back(std::move(day));
    }
    if (j.contains("genome")) {
      std::string lines;
      for (const json& line : j["genome"]) {
        lines += line.get<std::string>();
        lines += '\n';
      }
      PlanGenome genome = PlanGenome::parse(lines);
      genome.rng_seed = file.seed;
      file.genome = std::move(genome);
    }
    if (j.contains("fitness")) {
      const json& f = j["fitness"];
      FitnessReport report;
      report.f1 = f.value("f1", 0.0);
      report.term2 = f.value("term2", 0.0);
      report.term3 = f.value("term3", 0.0);
      report.total = f.value("total", 0.0);
      report.hard_violations = f.value("hard_violations", 0);
      report.commonsense_violations = f.value("commonsense_violations", 0);
      file.fitness = report;
    }
    return file;
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

PlanFile load_plan(const std::string& path) {
  return plan_from_json_text(read_text_file(path), path);
}

void save_plan(const PlanFile& file, const std::string& path) {
  write_text_file(path, plan_to_json_text(file));
}

std::string render_script_text(const ScriptBundle& bundle,
                               const KnowledgeGraph& graph) {
  std::string out;
  out += "# " + bundle.worldview.title + "\n\n";
  if (!bundle.worldview.background.empty()) {
    out += bundle.worldview.background + "\n\n";
  }
  if (!bundle.worldview.world_rules.empty()) {
    out += "World Rules:\n" + bundle.worldview.world_rules + "\n\n";
  }
  out += "## Characters\n\n";
  out += render_character_sheet(bundle.characters);
  out += "\n## Exposition\n\n";
  out += bundle.exposition + "\n";
  std::size_t next_transition = 0;
  for (std::size_t i = 0; i < bundle.itinerary.size(); ++i) {
    const std::string& id = bundle.itinerary[i];
    std::string name = graph.has_node(id) ? graph.node(id).name : id;
    if (i > 0 && bundle.itinerary[i - 1] != id &&
        next_transition < bundle.transitions.size()) {
      out += "\n— Transition —\n\n";
      out += bundle.transitions[next_transition].text + "\n";
      ++next_transition;
    }
    out += "\n## Scene: " + name + "\n\n";
    auto it = bundle.scene_units.find(id);
    if (it != bundle.scene_units.end()) {
      out += render_scene_text(it->second);
    }
  }
  return out;
}

}  // namespace tw
