#pragma once

#include <map>
#include <string>
#include <string_view>

#include "tw/common.hpp"

namespace tw {

enum class PromptKind {
  Worldview,
  Characters,
  Exposition,
  Scene,
  Transition,
  Survey,
  Judge,
};

std::string_view prompt_kind_name(PromptKind kind);

// The seven narrative templates, either compiled in or loaded from a
// directory of <name>.txt files. Immutable once constructed; the fingerprint
// identifies the exact template text a run used.
class PromptLibrary {
 public:
  static PromptLibrary builtin();
  static PromptLibrary load(const std::string& dir);

  const std::string& text(PromptKind kind) const;

  // Order-stable hash over all templates.
  uint64_t fingerprint() const;

 private:
  std::map<PromptKind, std::string> templates_;
};

// Replaces every "{key}" for keys present in values. Unknown braced spans
// stay untouched; values are inserted verbatim and not re-scanned.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values);

}  // namespace tw
