#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roomforge/geometry.hpp"
#include "roomforge/types.hpp"

namespace roomforge {

struct SceneObject {
  std::string category;
  int feature_code = 0;
  HumanAction action = HumanAction::NoneAction;
  Layout layout;
  std::string asset_id;  // empty when no asset was retrieved

  [[nodiscard]] OrientedBox box() const { return OrientedBox::from_layout(layout); }
};

// body proxy attached to one object; layout holds the world-frame box of the
// posed body (t = box center, s = half extents, rot = facing)
struct PlacedHuman {
  std::string pose_id;
  int contact_object_index = -1;
  Layout layout;

  [[nodiscard]] OrientedBox box() const { return OrientedBox::from_layout(layout); }
};

// counts summarizing the refinement stage, carried in scene metadata
struct RefinementSummary {
  int moved = 0;
  int removed = 0;
  int kept = 0;
  int passes = 0;
};

struct Scene {
  std::string scene_type;
  std::vector<SceneObject> objects;
  std::vector<PlacedHuman> humans;
  std::uint64_t seed = 0;
  std::string prompt;
  std::optional<RefinementSummary> refinement;
};

// category names must exist in the vocabulary, human contacts must point at
// objects, layouts must be valid
void validate_scene(const Scene& scene, const SceneTypeRegistry& registry);

}  // namespace roomforge
