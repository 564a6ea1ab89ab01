#include "roomforge/prompt/embed.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "roomforge/prompt/parse.hpp"
#include "roomforge/rng.hpp"

namespace roomforge::prompt {

namespace {

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<double> embed_prompt(const std::string& text, int dim) {
  std::vector<double> v(static_cast<size_t>(dim), 0.0);
  auto tokens = tokenize_words(text);
  if (tokens.empty()) return v;

  std::unordered_map<std::string, std::uint64_t> first_seen;
  for (size_t i = 0; i < tokens.size(); ++i)
    first_seen.emplace(tokens[i], static_cast<std::uint64_t>(i));

  for (const auto& tok : tokens) {
    std::uint64_t salt = Rng::mix(first_seen[tok]);
    std::uint64_t h = fnv1a64(tok, salt);
    std::uint64_t bucket = Rng::mix(h);
    double sign = (Rng::mix(h ^ 0x9e3779b97f4a7c15ULL) & 1) ? 1.0 : -1.0;
    v[bucket % static_cast<std::uint64_t>(dim)] += sign;
  }

  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return v;
}

}  // namespace roomforge::prompt
