#pragma once

#include <string>
#include <vector>

#include "roomforge/prompt/lexicon.hpp"
#include "roomforge/types.hpp"

namespace roomforge::prompt {

// object mentioned in the prompt, resolved against the scene-type vocabulary
struct AnchorNode {
  int category = -1;
  std::vector<std::string> adjectives;
};

// "node i is <predicate> of node j"
struct AnchorEdge {
  int i = -1;
  int j = -1;
  RelationPredicate predicate = RelationPredicate::None;
};

// partially specified scene graph recovered from free text; one node per
// distinct category mention
struct PartialGraph {
  std::vector<AnchorNode> nodes;
  std::vector<AnchorEdge> edges;
};

struct Triplet {
  std::string subject;
  RelationPredicate predicate = RelationPredicate::None;
  std::string object;
};

struct ParseResult {
  PartialGraph graph;
  std::vector<Triplet> triplets;
  std::vector<std::string> warnings;
};

// Accepts sentences of the form
//   "There is a(n) [adjectives] <category> [<relation phrase> a(n)/the
//   [adjectives] <category>]."
// Unparseable fragments are skipped with a warning instead of failing.
ParseResult parse_prompt(const std::string& text, const CategoryVocabulary& vocab,
                         const PhraseLexicon& lexicon);

// caption helpers (inverse of the parser on its supported grammar)
std::string render_object_sentence(const std::vector<std::string>& adjectives,
                                   const std::string& category);
std::string render_relation_sentence(const std::vector<std::string>& subject_adjectives,
                                     const std::string& subject,
                                     RelationPredicate predicate,
                                     const std::string& object,
                                     const PhraseLexicon& lexicon);

std::vector<std::string> tokenize_words(const std::string& text);

}  // namespace roomforge::prompt
