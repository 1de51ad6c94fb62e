#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lexv {

struct PromptTemplate {
  std::string_view name;  // file stem, e.g. "synthesize"
  std::string_view text;
};

/// Templates shipped in prompts/, compiled in at build time.
const std::vector<PromptTemplate>& prompt_templates();

/// Substitutes `{{key}}` placeholders. Throws Error for an unknown template
/// or a placeholder left without a value.
std::string render_prompt(std::string_view name, const std::map<std::string, std::string>& vars);

}  // namespace lexv
