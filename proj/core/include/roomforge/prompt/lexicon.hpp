#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roomforge/types.hpp"

namespace roomforge::prompt {

// surface phrases the grammar accepts for each predicate, longest first so
// "closely to the left of" wins over "to the left of"
class PhraseLexicon {
 public:
  static PhraseLexicon builtin();
  static PhraseLexicon from_json_file(const std::filesystem::path& path);

  [[nodiscard]] const std::string& phrase(RelationPredicate p) const;
  // phrases ordered by descending word count for greedy matching
  [[nodiscard]] const std::vector<std::pair<std::string, RelationPredicate>>& ordered()
      const {
    return ordered_;
  }
  [[nodiscard]] const std::vector<std::string>& style_adjectives() const {
    return adjectives_;
  }
  [[nodiscard]] bool is_style_adjective(const std::string& word) const;

 private:
  std::vector<std::string> phrases_;  // indexed by predicate
  std::vector<std::pair<std::string, RelationPredicate>> ordered_;
  std::vector<std::string> adjectives_;
  void finalize();
};

}  // namespace roomforge::prompt
