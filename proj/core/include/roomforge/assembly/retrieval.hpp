#pragma once

#include <array>
#include <string>
#include <vector>

#include "roomforge/assembly/catalog.hpp"
#include "roomforge/assembly/codebook.hpp"

namespace roomforge::assembly {

inline constexpr int kDefaultRetrievalTopK = 5;

// Two-stage lookup: within the requested category, rank by cosine similarity
// between the asset feature and the codebook entry, keep the top_k best, then
// take the entry whose half extents are closest to the requested size.  All
// ties fall to the ascending asset id, so results do not depend on catalog
// order.  An unknown category falls back to the closest catalog category by
// edit distance, with a warning.
const Asset& retrieve_object(const AssetCatalog& catalog, const FeatureCodebook& book,
                             const std::string& category, int feature_code,
                             const std::array<double, 3>& size,
                             int top_k = kDefaultRetrievalTopK,
                             std::vector<std::string>* warnings = nullptr);

// helper shared with tests: smallest single-character edit count between
// two strings
int edit_distance(const std::string& a, const std::string& b);

}  // namespace roomforge::assembly
