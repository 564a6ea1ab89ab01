#pragma once

#include <string>
#include <vector>

#include "roomforge/assembly/catalog.hpp"
#include "roomforge/assembly/codebook.hpp"
#include "roomforge/assembly/humans.hpp"
#include "roomforge/assembly/retrieval.hpp"
#include "roomforge/nn/transformer.hpp"
#include "roomforge/scene.hpp"
#include "roomforge/types.hpp"

namespace roomforge::assembly {

// Materializes a scene from fully-denoised graph tokens and per-object
// layouts: every node gets a retrieved asset, every interactive node gets a
// posed body.  Pure and deterministic in its inputs; retrieval fallbacks are
// reported through `warnings`.
Scene assemble_scene(const nn::GraphTokens& graph, const std::vector<Layout>& layouts,
                     const CategoryVocabulary& vocab, const AssetCatalog& catalog,
                     const FeatureCodebook& book, const PoseLibrary& poses,
                     int top_k = kDefaultRetrievalTopK,
                     std::vector<std::string>* warnings = nullptr);

}  // namespace roomforge::assembly
