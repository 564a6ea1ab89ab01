#pragma once

#include <string>
#include <vector>

namespace roomforge::prompt {

inline constexpr int kPromptEmbeddingDim = 512;

// Deterministic bag-of-words embedding with signed feature hashing.  Each
// token is salted with the position of its first occurrence, so repeated
// words reinforce one bucket while reorderings still change the vector.
// L2-normalized; empty or all-punctuation text maps to the zero vector.
std::vector<double> embed_prompt(const std::string& text,
                                 int dim = kPromptEmbeddingDim);

}  // namespace roomforge::prompt
