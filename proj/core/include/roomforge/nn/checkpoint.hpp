#pragma once

#include <filesystem>
#include <string>

#include "roomforge/nn/params.hpp"
#include "roomforge/nn/transformer.hpp"

namespace roomforge::nn {

// Binary weight file: "RFCK" magic, format version, a JSON header carrying
// the model kind, architecture, and caller metadata, then per-parameter f32
// payloads for both the live weights and their EMA shadow.  Values are
// stored as f32, so save -> load -> save is byte-identical.
inline constexpr char kCheckpointMagic[4] = {'R', 'F', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string kind;        // e.g. "graph_denoiser", "layout_denoiser"
  TransformerConfig config;
  std::string extra_json;  // caller metadata (norm stats, vocab, ...), "{}" if none
};

void save_checkpoint(const std::filesystem::path& path, const CheckpointMeta& meta,
                     const ParamStore& store);

// reads the header only
CheckpointMeta read_checkpoint_meta(const std::filesystem::path& path);

// loads weights into a store with identical parameter names and shapes
// (e.g. one freshly built from the checkpoint's config)
CheckpointMeta load_checkpoint(const std::filesystem::path& path, ParamStore& store);

}  // namespace roomforge::nn
