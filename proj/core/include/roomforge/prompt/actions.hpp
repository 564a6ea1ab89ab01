#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "roomforge/types.hpp"

namespace roomforge::prompt {

// ranked interaction rules per scene type and category, with generic
// fallbacks ("chair", "sofa", "bed", "table") matched as name substrings
class ActionRuleTable {
 public:
  static ActionRuleTable builtin();
  static ActionRuleTable from_json_file(const std::filesystem::path& path);

  void set_rule(const std::string& scene_type, const std::string& category,
                std::vector<HumanAction> ranked);
  void set_alias(const std::string& word, std::vector<HumanAction> ranked);

  // ranked actions, most specific source first; empty if nothing applies
  [[nodiscard]] std::vector<HumanAction> lookup(const std::string& scene_type,
                                                const std::string& category) const;
  // first ranked action, NoneAction when no rule matches
  [[nodiscard]] HumanAction primary(const std::string& scene_type,
                                    const std::string& category) const;

  // every category of every registered scene type must resolve to a rule
  void validate_total(const SceneTypeRegistry& registry) const;

 private:
  std::map<std::string, std::map<std::string, std::vector<HumanAction>>> rules_;
  std::map<std::string, std::vector<HumanAction>> aliases_;
};

// minimal text-completion client so action inference can defer to a language
// model when one is reachable
class TextCompleter {
 public:
  virtual ~TextCompleter() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

struct CompleterConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080/v1/completions"
  std::string model;
  int timeout_ms = 10000;
};

std::unique_ptr<TextCompleter> make_http_completer(const CompleterConfig& config);

std::string action_query_prompt(const std::string& scene_type,
                                const std::vector<std::string>& categories);

// parses a comma-separated action list reply; false when the reply is
// malformed or the count does not match
bool parse_action_reply(const std::string& reply, size_t expected,
                        std::vector<HumanAction>& out);

// one action per category; the completer (when given) is asked first and the
// rule table backs it up on error or malformed output
std::vector<HumanAction> infer_actions(const std::string& scene_type,
                                       const std::vector<std::string>& categories,
                                       const ActionRuleTable& rules,
                                       TextCompleter* completer = nullptr,
                                       std::vector<std::string>* warnings = nullptr);

}  // namespace roomforge::prompt
