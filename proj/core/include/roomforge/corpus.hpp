#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "roomforge/nn/transformer.hpp"
#include "roomforge/prompt/parse.hpp"
#include "roomforge/scene.hpp"
#include "roomforge/types.hpp"

namespace roomforge::corpus {

// one nominal furniture placement inside a room template; coordinates are
// meters from the room center, yaw is radians counterclockwise
struct TemplateItem {
  std::string category;
  double x = 0.0;
  double y = 0.0;
  double z = -1.0;  // negative means grounded at half the object height
  double yaw = 0.0;
  double prob = 1.0;         // chance the item appears in a generated scene
  double action_prob = 0.0;  // chance the item is marked as used by a human
};

struct SceneTemplate {
  std::string name;
  std::vector<TemplateItem> items;
};

// room templates grouped by scene type, loadable from JSON so new scene
// types need no code changes
struct TemplateLibrary {
  std::map<std::string, std::vector<SceneTemplate>> by_scene_type;

  static TemplateLibrary builtin();
  [[nodiscard]] std::string to_json() const;
  static TemplateLibrary from_json(const std::string& text,
                                   const std::string& origin = "<string>");
  static TemplateLibrary load(const std::filesystem::path& path);
};

struct GeneratorConfig {
  std::string scene_type = "bedroom";
  double room_half_x = 2.5;  // meters
  double room_half_y = 2.5;
  double position_jitter = 0.08;   // uniform offset applied per axis, meters
  double size_jitter = 0.10;       // relative half-extent jitter per axis
  double caption_style_prob = 0.5; // chance the caption carries a style word
  int test_permille = 100;         // split threshold for hash(id) % 1000
  std::uint64_t seed = 20240002;
  std::vector<SceneTemplate> templates;  // empty falls back to the built-ins
};

// ground-truth training example: the caption's triplets all hold on the
// layouts, the graph tokens mirror the scene objects one-to-one, and at
// least one object carries a human action
struct SceneRecord {
  std::string id;
  std::string split;  // "train" or "test"
  std::string caption;
  std::vector<prompt::Triplet> triplets;
  nn::GraphTokens graph;
  Scene scene;  // ground truth carries no humans
};

struct Corpus {
  int version = 1;
  std::string scene_type;
  std::uint64_t config_hash = 0;
  std::vector<SceneRecord> records;
};

// stable fingerprint of every generation parameter including the templates
std::uint64_t generator_config_hash(const GeneratorConfig& cfg);

// seed-stable train/test assignment from the record id alone
std::string split_for_id(const std::string& id, int test_permille);

// deterministic per seed; generated ground truth has zero object-object
// collisions, instance counts within the scene type's range, and captions
// built from one or two realized relation triplets
Corpus generate_corpus(const GeneratorConfig& cfg, int count);

// newline-delimited JSON: a header line with format version and config hash,
// then one record per line in canonical field order (byte-stable round trip)
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

std::string record_to_json(const SceneRecord& record);
SceneRecord record_from_json(const std::string& text, const std::string& origin,
                             int line_number);

// reads a directory of room JSON files (uid, room_type, furniture list with
// category/position/size/yaw) into records; categories are mapped through
// the catalog's alias table, unmappable objects are skipped with a warning
Corpus ingest_3dfront(const std::filesystem::path& directory,
                      const std::string& scene_type,
                      std::vector<std::string>* warnings = nullptr);

// pointers into the corpus for one split tag
std::vector<const SceneRecord*> split_records(const Corpus& corpus,
                                              const std::string& split);

}  // namespace roomforge::corpus
