#include "roomforge/prompt/parse.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace roomforge::prompt {

namespace {

bool is_article(const std::string& w) { return w == "a" || w == "an" || w == "the"; }

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct CategoryMatcher {
  // category word sequences, longest first
  std::vector<std::pair<std::vector<std::string>, int>> entries;

  explicit CategoryMatcher(const CategoryVocabulary& vocab) {
    for (int c = 0; c < vocab.size(); ++c)
      entries.emplace_back(split_words(vocab.name(c)), c);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
      return a.second < b.second;
    });
  }

  // longest category starting at pos; returns (category, words consumed)
  [[nodiscard]] std::pair<int, size_t> match_at(const std::vector<std::string>& toks,
                                                size_t pos) const {
    for (const auto& [words, cat] : entries) {
      if (pos + words.size() > toks.size()) continue;
      if (std::equal(words.begin(), words.end(), toks.begin() + pos))
        return {cat, words.size()};
    }
    return {-1, 0};
  }
};

std::pair<RelationPredicate, size_t> match_phrase(
    const PhraseLexicon& lexicon, const std::vector<std::string>& toks, size_t pos) {
  for (const auto& [phrase, pred] : lexicon.ordered()) {
    auto words = split_words(phrase);
    if (pos + words.size() > toks.size()) continue;
    if (std::equal(words.begin(), words.end(), toks.begin() + pos))
      return {pred, words.size()};
  }
  return {RelationPredicate::None, 0};
}

struct NounPhrase {
  int category = -1;
  std::vector<std::string> adjectives;
};

// [article] adjective* category; fails by returning category == -1
NounPhrase parse_noun_phrase(const std::vector<std::string>& toks, size_t& pos,
                             const CategoryMatcher& matcher) {
  NounPhrase np;
  size_t start = pos;
  if (start < toks.size() && is_article(toks[start])) ++start;
  for (size_t q = start; q < toks.size(); ++q) {
    auto [cat, len] = matcher.match_at(toks, q);
    if (cat < 0) continue;
    np.category = cat;
    for (size_t k = start; k < q; ++k)
      if (!is_article(toks[k])) np.adjectives.push_back(toks[k]);
    pos = q + len;
    return np;
  }
  return np;
}

std::string join(const std::vector<std::string>& toks, size_t from, size_t to) {
  std::string out;
  for (size_t i = from; i < to && i < toks.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += toks[i];
  }
  return out;
}

std::string article_for(const std::string& noun) {
  if (noun.empty()) return "a";
  switch (noun.front()) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
    default: return "a";
  }
}

std::string with_adjectives(const std::vector<std::string>& adjectives,
                            const std::string& category) {
  std::string out;
  for (const auto& a : adjectives) out += a + ' ';
  out += category;
  return out;
}

}  // namespace

std::vector<std::string> tokenize_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ParseResult parse_prompt(const std::string& text, const CategoryVocabulary& vocab,
                         const PhraseLexicon& lexicon) {
  ParseResult result;
  CategoryMatcher matcher(vocab);

  // sentence segmentation, then clause split at "and there"
  std::vector<std::vector<std::string>> clauses;
  std::string sentence;
  auto flush_sentence = [&] {
    auto toks = tokenize_words(sentence);
    sentence.clear();
    if (toks.empty()) return;
    size_t begin = 0;
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
      if (toks[i] == "and" && toks[i + 1] == "there") {
        clauses.emplace_back(toks.begin() + begin, toks.begin() + i);
        begin = i + 1;
      }
    }
    clauses.emplace_back(toks.begin() + begin, toks.end());
  };
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?' || c == ';') {
      flush_sentence();
    } else {
      sentence += c;
    }
  }
  flush_sentence();

  auto node_index = [&](const NounPhrase& np) {
    for (size_t i = 0; i < result.graph.nodes.size(); ++i) {
      if (result.graph.nodes[i].category == np.category) {
        auto& adjs = result.graph.nodes[i].adjectives;
        for (const auto& a : np.adjectives)
          if (std::find(adjs.begin(), adjs.end(), a) == adjs.end()) adjs.push_back(a);
        return static_cast<int>(i);
      }
    }
    result.graph.nodes.push_back({np.category, np.adjectives});
    return static_cast<int>(result.graph.nodes.size() - 1);
  };

  for (const auto& toks : clauses) {
    size_t pos = 0;
    if (toks.size() >= 2 && toks[0] == "there" && (toks[1] == "is" || toks[1] == "are")) {
      pos = 2;
    } else {
      result.warnings.push_back("clause \"" + join(toks, 0, toks.size()) +
                                "\" does not start with \"there is\"");
    }

    NounPhrase subject = parse_noun_phrase(toks, pos, matcher);
    if (subject.category < 0) {
      result.warnings.push_back("no known object in clause \"" +
                                join(toks, 0, toks.size()) + "\"");
      continue;
    }
    for (const auto& adj : subject.adjectives)
      if (!lexicon.is_style_adjective(adj))
        result.warnings.push_back("unrecognized adjective \"" + adj + "\"");
    int si = node_index(subject);

    if (pos >= toks.size()) continue;  // bare object sentence

    auto [pred, consumed] = match_phrase(lexicon, toks, pos);
    if (pred == RelationPredicate::None) {
      result.warnings.push_back("ignoring trailing words \"" +
                                join(toks, pos, toks.size()) + "\"");
      continue;
    }
    pos += consumed;

    NounPhrase object = parse_noun_phrase(toks, pos, matcher);
    if (object.category < 0) {
      result.warnings.push_back("relation \"" + lexicon.phrase(pred) +
                                "\" has no known object in clause \"" +
                                join(toks, 0, toks.size()) + "\"");
      continue;
    }
    for (const auto& adj : object.adjectives)
      if (!lexicon.is_style_adjective(adj))
        result.warnings.push_back("unrecognized adjective \"" + adj + "\"");
    int oi = node_index(object);
    if (pos < toks.size())
      result.warnings.push_back("ignoring trailing words \"" +
                                join(toks, pos, toks.size()) + "\"");

    result.triplets.push_back(
        {vocab.name(subject.category), pred, vocab.name(object.category)});

    if (si == oi) {
      result.warnings.push_back("dropping self-relation on \"" +
                                vocab.name(subject.category) + "\"");
      continue;
    }
    bool conflict = false;
    bool duplicate = false;
    for (const auto& e : result.graph.edges) {
      if (e.i == si && e.j == oi) {
        if (e.predicate == pred) duplicate = true;
        else conflict = true;
      } else if (e.i == oi && e.j == si) {
        if (e.predicate == inverse_predicate(pred)) duplicate = true;
        else conflict = true;
      }
    }
    if (conflict)
      result.warnings.push_back("conflicting relation between \"" +
                                vocab.name(subject.category) + "\" and \"" +
                                vocab.name(object.category) + "\" ignored");
    else if (!duplicate)
      result.graph.edges.push_back({si, oi, pred});
  }

  return result;
}

std::string render_object_sentence(const std::vector<std::string>& adjectives,
                                   const std::string& category) {
  std::string np = with_adjectives(adjectives, category);
  return "There is " + article_for(np) + " " + np + ".";
}

std::string render_relation_sentence(const std::vector<std::string>& subject_adjectives,
                                     const std::string& subject,
                                     RelationPredicate predicate,
                                     const std::string& object,
                                     const PhraseLexicon& lexicon) {
  std::string np = with_adjectives(subject_adjectives, subject);
  return "There is " + article_for(np) + " " + np + " " + lexicon.phrase(predicate) +
         " the " + object + ".";
}

}  // namespace roomforge::prompt
