#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roomforge/assembly/assemble.hpp"
#include "roomforge/corpus.hpp"
#include "roomforge/diffusion/continuous.hpp"
#include "roomforge/diffusion/discrete.hpp"
#include "roomforge/optimize.hpp"
#include "roomforge/prompt/actions.hpp"
#include "roomforge/prompt/parse.hpp"
#include "roomforge/scene.hpp"
#include "roomforge/types.hpp"

namespace roomforge {

// ---------------------------------------------------------------------------
// model profiles

// architecture + training budget preset; attribute alphabet sizes are filled
// in from the scene type when training starts
struct ModelProfile {
  std::string name;
  nn::TransformerConfig graph;   // denoiser over graph tokens, T = 100
  nn::TransformerConfig layout;  // denoiser over layout rows, T = 10
  diffusion::GraphTrainConfig graph_train;
  diffusion::LayoutTrainConfig layout_train;

  // small model that trains on a single CPU core in minutes
  static ModelProfile desk();
  // full-size model; far too slow for tests, provided for completeness
  static ModelProfile paper();
  // "desk" or "paper"; anything else throws ConfigError
  static ModelProfile named(const std::string& name);
};

// ---------------------------------------------------------------------------
// training

// artifact file names inside a run directory
inline constexpr const char* kGraphCheckpointFile = "graph_denoiser.ckpt";
inline constexpr const char* kLayoutCheckpointFile = "layout_denoiser.ckpt";
inline constexpr const char* kCatalogFile = "catalog.json";
inline constexpr const char* kCodebookFile = "codebook.json";

// training views of a corpus record; lambda is the embedded caption
diffusion::GraphExample graph_example_from_record(const corpus::SceneRecord& rec,
                                                  int lambda_dim);
diffusion::LayoutExample layout_example_from_record(const corpus::SceneRecord& rec,
                                                    int lambda_dim);

// clean graph tokens recovered from a concrete scene: categories, features,
// and actions straight from the objects, relations re-derived from the
// layouts; throws when a category is missing from the vocabulary
nn::GraphTokens graph_tokens_from_scene(const Scene& scene,
                                        const CategoryVocabulary& vocab);

struct TrainReport {
  int train_records = 0;
  double final_graph_loss = 0.0;
  double final_layout_loss = 0.0;
  std::filesystem::path graph_checkpoint;
  std::filesystem::path layout_checkpoint;
  std::filesystem::path catalog_path;
  std::filesystem::path codebook_path;
};

// Trains the graph and layout denoisers separately on the corpus' train
// split and writes everything synthesis needs into out_dir: both
// checkpoints (with scene type, node-count histogram, and normalization
// statistics in their metadata), the asset catalog, and the feature
// codebook.  Deterministic for a given (corpus, profile, seed).
TrainReport train_pipeline(const corpus::Corpus& corpus, const ModelProfile& profile,
                           const std::filesystem::path& out_dir, std::uint64_t seed,
                           const std::function<void(const std::string&)>& log = {});

// ---------------------------------------------------------------------------
// synthesis

// everything synthesize() needs, loaded once and reused across requests
struct PipelineContext {
  std::string scene_type;
  SceneTypeSpec spec;
  prompt::PhraseLexicon lexicon;
  prompt::ActionRuleTable actions;
  FunctionalGroups groups;
  assembly::AssetCatalog catalog;
  assembly::FeatureCodebook codebook;
  assembly::PoseLibrary poses;
  std::unique_ptr<nn::SceneTransformer> graph_model;
  std::unique_ptr<nn::SceneTransformer> layout_model;
  diffusion::LayoutNormStats norm;
  diffusion::MaskSchedule mask_schedule;
  diffusion::LayoutSchedule layout_schedule;
  std::vector<int> size_histogram;  // training scenes per object count
  int retrieval_top_k = assembly::kDefaultRetrievalTopK;
};

// loads a directory written by train_pipeline; a missing or unreadable
// artifact throws UntrainedModelError
PipelineContext load_pipeline(const std::filesystem::path& dir);

// zero-shot task selector; all modes share the same trained checkpoints
enum class SynthesisMode {
  Full,       // prompt -> scene
  Stylize,    // re-predict appearance features, keep everything else
  Rearrange,  // re-predict relations and layout, keep object identities
  Complete,   // add objects while preserving the existing ones bit for bit
  Uncond,     // ignore the prompt; sample from the learned distribution
};
const char* to_string(SynthesisMode m);
std::optional<SynthesisMode> synthesis_mode_from_string(const std::string& name);

struct SynthesisRequest {
  std::string prompt;
  SynthesisMode mode = SynthesisMode::Full;
  std::uint64_t seed = 0;
  bool skip_optimize = false;
  int object_count = 0;  // 0 = draw from the trained node-count distribution
  int add_objects = 2;   // Complete: how many new slots to open
  const Scene* input_scene = nullptr;  // Stylize / Rearrange / Complete
  OptimizerConfig optimizer{};
  int max_passes = 3;
};

struct SynthesisResult {
  Scene scene;
  nn::GraphTokens graph;  // fully denoised tokens behind the scene
  std::vector<prompt::Triplet> triplets;
  std::vector<std::string> warnings;
};

// Runs the staged pipeline: parse the prompt into anchors, infer human
// actions for mentioned objects, embed the text, sample the scene graph,
// sample per-object layouts, assemble assets and posed bodies, then refine
// around the humans (unless skipped).  Samples on EMA weights; deterministic
// for a given (context, request).
SynthesisResult synthesize(PipelineContext& ctx, const SynthesisRequest& req);

}  // namespace roomforge
