#include "roomforge/prompt/actions.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "roomforge/errors.hpp"

namespace roomforge::prompt {

namespace {

std::string trim_lower(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<HumanAction> actions_from_names(const std::vector<std::string>& names,
                                            const std::string& context) {
  std::vector<HumanAction> out;
  for (const auto& n : names) {
    auto a = action_from_string(n);
    if (!a) throw ConfigError("unknown action \"" + n + "\" in " + context);
    out.push_back(*a);
  }
  return out;
}

std::string humanize(const std::string& scene_type) {
  std::string out = scene_type;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

ActionRuleTable ActionRuleTable::builtin() {
  ActionRuleTable t;
  using A = HumanAction;
  auto set = [&](const std::string& st, const std::string& cat,
                 std::vector<A> ranked) { t.set_rule(st, cat, std::move(ranked)); };

  const std::string bed = "bedroom";
  set(bed, "armchair", {A::Sitting});
  set(bed, "bookshelf", {A::NoneAction});
  set(bed, "cabinet", {A::Touching});
  set(bed, "ceiling lamp", {A::NoneAction});
  set(bed, "chair", {A::Sitting});
  set(bed, "children cabinet", {A::Touching});
  set(bed, "coffee table", {A::NoneAction});
  set(bed, "desk", {A::NoneAction});
  set(bed, "double bed", {A::Lying});
  set(bed, "dresser", {A::Touching});
  set(bed, "dressing table", {A::Touching});
  set(bed, "kids bed", {A::Lying});
  set(bed, "nightstand", {A::NoneAction});
  set(bed, "pendant lamp", {A::NoneAction});
  set(bed, "shelf", {A::NoneAction});
  set(bed, "single bed", {A::Lying});
  set(bed, "sofa", {A::Lying, A::Sitting});
  set(bed, "stool", {A::Sitting});
  set(bed, "table", {A::NoneAction});
  set(bed, "tv stand", {A::NoneAction});
  set(bed, "wardrobe", {A::Touching});

  for (const char* st : {"living_room", "dining_room"}) {
    set(st, "armchair", {A::Sitting});
    set(st, "bookshelf", {A::NoneAction});
    set(st, "cabinet", {A::Touching});
    set(st, "ceiling lamp", {A::NoneAction});
    set(st, "chaise longue sofa", {A::Lying, A::Sitting});
    set(st, "chinese chair", {A::Sitting});
    set(st, "coffee table", {A::NoneAction});
    set(st, "console table", {A::NoneAction});
    set(st, "corner side table", {A::NoneAction});
    set(st, "desk", {A::NoneAction});
    set(st, "dining chair", {A::Sitting});
    set(st, "dining table", {A::NoneAction});
    set(st, "l shaped sofa", {A::Lying, A::Sitting});
    set(st, "lazy sofa", {A::Lying, A::Sitting});
    set(st, "lounge chair", {A::Sitting});
    set(st, "loveseat sofa", {A::Sitting, A::Lying});
    set(st, "multi seat sofa", {A::Lying, A::Sitting});
    set(st, "pendant lamp", {A::NoneAction});
    set(st, "round end table", {A::NoneAction});
    set(st, "shelf", {A::NoneAction});
    set(st, "stool", {A::Sitting});
    set(st, "tv stand", {A::NoneAction});
    set(st, "wardrobe", {A::Touching});
    set(st, "wine cabinet", {A::Touching});
  }

  t.set_alias("chair", {A::Sitting});
  t.set_alias("sofa", {A::Lying, A::Sitting});
  t.set_alias("bed", {A::Lying});
  t.set_alias("table", {A::NoneAction});
  t.set_alias("lamp", {A::NoneAction});
  t.set_alias("cabinet", {A::Touching});
  t.set_alias("shelf", {A::NoneAction});
  t.set_alias("stool", {A::Sitting});
  t.set_alias("wardrobe", {A::Touching});
  return t;
}

ActionRuleTable ActionRuleTable::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError(path.string(), 0, "cannot open file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FileFormatError(path.string(), 0, e.what());
  }
  ActionRuleTable t;
  for (const auto& [scene_type, table] : doc.items()) {
    if (!table.is_object())
      throw FileFormatError(path.string(), 0,
                            "expected object for \"" + scene_type + "\"");
    for (const auto& [cat, ranked] : table.items()) {
      auto names = ranked.get<std::vector<std::string>>();
      auto actions = actions_from_names(names, path.string());
      if (scene_type == "aliases")
        t.set_alias(cat, actions);
      else
        t.set_rule(scene_type, cat, actions);
    }
  }
  return t;
}

void ActionRuleTable::set_rule(const std::string& scene_type,
                               const std::string& category,
                               std::vector<HumanAction> ranked) {
  if (ranked.empty()) throw ConfigError("empty action rule for \"" + category + "\"");
  rules_[scene_type][category] = std::move(ranked);
}

void ActionRuleTable::set_alias(const std::string& word,
                                std::vector<HumanAction> ranked) {
  if (ranked.empty()) throw ConfigError("empty action alias for \"" + word + "\"");
  aliases_[word] = std::move(ranked);
}

std::vector<HumanAction> ActionRuleTable::lookup(const std::string& scene_type,
                                                 const std::string& category) const {
  auto st = rules_.find(scene_type);
  if (st != rules_.end()) {
    auto it = st->second.find(category);
    if (it != st->second.end()) return it->second;
  }
  // fallback: longest alias appearing inside the category name
  const std::vector<HumanAction>* best = nullptr;
  size_t best_len = 0;
  for (const auto& [word, ranked] : aliases_) {
    if (word.size() <= best_len) continue;
    if (category.find(word) != std::string::npos) {
      best = &ranked;
      best_len = word.size();
    }
  }
  if (best) return *best;
  return {};
}

HumanAction ActionRuleTable::primary(const std::string& scene_type,
                                     const std::string& category) const {
  auto ranked = lookup(scene_type, category);
  return ranked.empty() ? HumanAction::NoneAction : ranked.front();
}

void ActionRuleTable::validate_total(const SceneTypeRegistry& registry) const {
  for (const auto& spec : registry.all()) {
    for (int c = 0; c < spec.vocab.size(); ++c) {
      if (lookup(spec.type.name, spec.vocab.name(c)).empty())
        throw ConfigError("no action rule covers \"" + spec.vocab.name(c) +
                          "\" in scene type \"" + spec.type.name + "\"");
    }
  }
}

namespace {

class HttpCompleter final : public TextCompleter {
 public:
  explicit HttpCompleter(CompleterConfig config) : config_(std::move(config)) {
    auto& url = config_.endpoint;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw ConfigError("completer endpoint must be an http:// URL");
    auto path_start = url.find('/', scheme_end + 3);
    host_ = url.substr(0, path_start == std::string::npos ? url.size() : path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  }

  std::string complete(const std::string& prompt) override {
    httplib::Client client(host_);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    nlohmann::json body{{"model", config_.model}, {"prompt", prompt}};
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw Error("completer request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error("completer returned HTTP " + std::to_string(res->status));
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) throw Error("completer returned invalid JSON");
    if (doc.contains("text")) return doc["text"].get<std::string>();
    if (doc.contains("choices") && doc["choices"].is_array() &&
        !doc["choices"].empty() && doc["choices"][0].contains("text"))
      return doc["choices"][0]["text"].get<std::string>();
    throw Error("completer reply has no text field");
  }

 private:
  CompleterConfig config_;
  std::string host_;
  std::string path_;
};

}  // namespace

std::unique_ptr<TextCompleter> make_http_completer(const CompleterConfig& config) {
  return std::make_unique<HttpCompleter>(config);
}

std::string action_query_prompt(const std::string& scene_type,
                                const std::vector<std::string>& categories) {
  std::ostringstream out;
  out << "In a " << humanize(scene_type)
      << ", please infer the potential human-object interactions given a list of "
         "objects. For example: Given objects 'chair, sofa, tv stand, cabinet, "
         "pendant lamp', you should return 'sitting, lying, none, touching, none'. "
         "These objects are '";
  for (size_t i = 0; i < categories.size(); ++i) {
    if (i) out << ", ";
    out << categories[i];
  }
  out << "', the corresponding human actions should be:";
  return out.str();
}

bool parse_action_reply(const std::string& reply, size_t expected,
                        std::vector<HumanAction>& out) {
  out.clear();
  std::string cleaned;
  for (char c : reply) cleaned += (c == '\n' || c == '\'' || c == '"') ? ' ' : c;
  std::istringstream in(cleaned);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string word = trim_lower(item);
    if (word.empty()) continue;
    // tolerate trailing period on the last item
    if (!word.empty() && word.back() == '.') word.pop_back();
    auto a = action_from_string(word);
    if (!a) return false;
    out.push_back(*a);
  }
  return out.size() == expected;
}

std::vector<HumanAction> infer_actions(const std::string& scene_type,
                                       const std::vector<std::string>& categories,
                                       const ActionRuleTable& rules,
                                       TextCompleter* completer,
                                       std::vector<std::string>* warnings) {
  if (completer) {
    try {
      std::string reply = completer->complete(action_query_prompt(scene_type, categories));
      std::vector<HumanAction> parsed;
      if (parse_action_reply(reply, categories.size(), parsed)) return parsed;
      if (warnings)
        warnings->push_back("completer reply was malformed; using built-in rules");
    } catch (const std::exception& e) {
      if (warnings)
        warnings->push_back(std::string("completer unavailable (") + e.what() +
                            "); using built-in rules");
    }
  }
  std::vector<HumanAction> out;
  out.reserve(categories.size());
  for (const auto& cat : categories) out.push_back(rules.primary(scene_type, cat));
  return out;
}

}  // namespace roomforge::prompt
