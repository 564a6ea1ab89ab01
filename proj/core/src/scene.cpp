#include "roomforge/scene.hpp"

#include "roomforge/errors.hpp"

namespace roomforge {

void validate_scene(const Scene& scene, const SceneTypeRegistry& registry) {
  const auto& spec = registry.get(scene.scene_type);
  for (const auto& obj : scene.objects) {
    if (!spec.vocab.index_of(obj.category))
      throw Error("scene object category '" + obj.category + "' not in " +
                  scene.scene_type + " vocabulary");
    if (!obj.layout.valid()) throw Error("invalid layout on object '" + obj.category + "'");
  }
  for (const auto& h : scene.humans) {
    if (h.contact_object_index < 0 ||
        h.contact_object_index >= static_cast<int>(scene.objects.size()))
      throw Error("human contact index out of range");
    if (!h.layout.valid()) throw Error("invalid layout on human '" + h.pose_id + "'");
  }
}

}  // namespace roomforge
