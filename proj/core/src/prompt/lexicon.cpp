#include "roomforge/prompt/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roomforge/errors.hpp"

namespace roomforge::prompt {

namespace {

int word_count(const std::string& s) {
  std::istringstream in(s);
  std::string w;
  int n = 0;
  while (in >> w) ++n;
  return n;
}

}  // namespace

PhraseLexicon PhraseLexicon::builtin() {
  PhraseLexicon lex;
  lex.phrases_.assign(kRelationCount, "");
  lex.phrases_[static_cast<int>(RelationPredicate::LeftOf)] = "to the left of";
  lex.phrases_[static_cast<int>(RelationPredicate::RightOf)] = "to the right of";
  lex.phrases_[static_cast<int>(RelationPredicate::InFrontOf)] = "in front of";
  lex.phrases_[static_cast<int>(RelationPredicate::Behind)] = "behind";
  lex.phrases_[static_cast<int>(RelationPredicate::CloselyLeftOf)] =
      "closely to the left of";
  lex.phrases_[static_cast<int>(RelationPredicate::CloselyRightOf)] =
      "closely to the right of";
  lex.phrases_[static_cast<int>(RelationPredicate::CloselyInFrontOf)] =
      "closely in front of";
  lex.phrases_[static_cast<int>(RelationPredicate::CloselyBehind)] = "closely behind";
  lex.phrases_[static_cast<int>(RelationPredicate::Above)] = "above";
  lex.phrases_[static_cast<int>(RelationPredicate::Below)] = "below";
  lex.adjectives_ = {"modern",     "wooden", "vintage", "industrial",
                     "minimalist", "classic", "metal",  "fabric"};
  lex.finalize();
  return lex;
}

PhraseLexicon PhraseLexicon::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError(path.string(), 0, "cannot open file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FileFormatError(path.string(), 0, e.what());
  }
  PhraseLexicon lex;
  lex.phrases_.assign(kRelationCount, "");
  if (!doc.contains("phrases") || !doc["phrases"].is_object())
    throw FileFormatError(path.string(), 0, "missing \"phrases\" object");
  for (const auto& [key, val] : doc["phrases"].items()) {
    auto p = relation_from_string(key);
    if (!p)
      throw FileFormatError(path.string(), 0, "unknown predicate \"" + key + "\"");
    lex.phrases_[static_cast<int>(*p)] = val.get<std::string>();
  }
  for (int i = 0; i < kRelationCount; ++i) {
    if (i == static_cast<int>(RelationPredicate::None)) continue;
    if (lex.phrases_[i].empty())
      throw FileFormatError(
          path.string(), 0,
          "missing phrase for " +
              std::string(to_string(static_cast<RelationPredicate>(i))));
  }
  if (doc.contains("style_adjectives"))
    lex.adjectives_ = doc["style_adjectives"].get<std::vector<std::string>>();
  lex.finalize();
  return lex;
}

void PhraseLexicon::finalize() {
  ordered_.clear();
  for (int i = 0; i < kRelationCount; ++i) {
    if (phrases_[i].empty()) continue;
    ordered_.emplace_back(phrases_[i], static_cast<RelationPredicate>(i));
  }
  std::sort(ordered_.begin(), ordered_.end(), [](const auto& a, const auto& b) {
    int wa = word_count(a.first), wb = word_count(b.first);
    if (wa != wb) return wa > wb;
    return a.first < b.first;
  });
}

const std::string& PhraseLexicon::phrase(RelationPredicate p) const {
  return phrases_.at(static_cast<size_t>(p));
}

bool PhraseLexicon::is_style_adjective(const std::string& word) const {
  return std::find(adjectives_.begin(), adjectives_.end(), word) != adjectives_.end();
}

}  // namespace roomforge::prompt
