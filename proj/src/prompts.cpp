#include "tw/prompts.hpp"

#include <array>

#include "prompt_defaults.inc"

namespace tw {

namespace {

constexpr std::array<PromptKind, 7> kAllKinds = {
    PromptKind::Worldview, PromptKind::Characters, PromptKind::Exposition,
    PromptKind::Scene,     PromptKind::Transition, PromptKind::Survey,
    PromptKind::Judge,
};

}  // namespace

std::string_view prompt_kind_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::Worldview: return "worldview";
    case PromptKind::Characters: return "characters";
    case PromptKind::Exposition: return "exposition";
    case PromptKind::Scene: return "scene";
    case PromptKind::Transition: return "transition";
    case PromptKind::Survey: return "survey";
    case PromptKind::Judge: return "judge";
  }
  throw ConfigError("unknown prompt kind");
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  lib.templates_[PromptKind::Worldview] = std::string(embedded::k_worldview);
  lib.templates_[PromptKind::Characters] = std::string(embedded::k_characters);
  lib.templates_[PromptKind::Exposition] = std::string(embedded::k_exposition);
  lib.templates_[PromptKind::Scene] = std::string(embedded::k_scene);
  lib.templates_[PromptKind::Transition] = std::string(embedded::k_transition);
  lib.templates_[PromptKind::Survey] = std::string(embedded::k_survey);
  lib.templates_[PromptKind::Judge] = std::string(embedded::k_judge);
  return lib;
}

PromptLibrary PromptLibrary::load(const std::string& dir) {
  PromptLibrary lib;
  for (PromptKind kind : kAllKinds) {
    std::string path =
        dir + "/" + std::string(prompt_kind_name(kind)) + ".txt";
    std::string text = read_text_file(path);
    if (trim(text).empty()) {
      throw ConfigError("prompt template is empty: " + path);
    }
    lib.templates_[kind] = std::move(text);
  }
  return lib;
}

const std::string& PromptLibrary::text(PromptKind kind) const {
  auto it = templates_.find(kind);
  if (it == templates_.end()) {
    throw ConfigError("prompt library has no template: " +
                      std::string(prompt_kind_name(kind)));
  }
  return it->second;
}

uint64_t PromptLibrary::fingerprint() const {
  std::string all;
  for (PromptKind kind : kAllKinds) {
    all += prompt_kind_name(kind);
    all += '\x1e';
    all += text(kind);
    all += '\x1e';
  }
  return fnv1a64(all);
}

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    std::size_t open = tpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    out.append(tpl.substr(pos, open - pos));
    std::size_t close = tpl.find('}', open);
    if (close == std::string_view::npos) {
      out.append(tpl.substr(open));
      break;
    }
    std::string key(tpl.substr(open + 1, close - open - 1));
    auto it = values.find(key);
    if (it != values.end()) {
      out += it->second;
      pos = close + 1;
    } else {
      out += '{';
      pos = open + 1;
    }
  }
  return out;
}

}  // namespace tw
