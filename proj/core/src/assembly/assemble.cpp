#include "roomforge/assembly/assemble.hpp"

#include "roomforge/errors.hpp"

namespace roomforge::assembly {

Scene assemble_scene(const nn::GraphTokens& graph, const std::vector<Layout>& layouts,
                     const CategoryVocabulary& vocab, const AssetCatalog& catalog,
                     const FeatureCodebook& book, const PoseLibrary& poses, int top_k,
                     std::vector<std::string>* warnings) {
  const int n = graph.n;
  if (static_cast<int>(layouts.size()) != n)
    throw Error("assembly needs one layout per graph node");
  if (static_cast<int>(graph.categories.size()) != n ||
      static_cast<int>(graph.features.size()) != n ||
      static_cast<int>(graph.actions.size()) != n)
    throw Error("graph attribute lists do not match the node count");

  Scene scene;
  scene.scene_type = vocab.scene_type_name();
  scene.objects.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int cat = graph.categories[static_cast<size_t>(i)];
    int code = graph.features[static_cast<size_t>(i)];
    int act = graph.actions[static_cast<size_t>(i)];
    if (cat < 0 || cat >= vocab.size())
      throw Error("node " + std::to_string(i) + " category is not fully denoised");
    if (act < 0 || act >= kActionCount)
      throw Error("node " + std::to_string(i) + " action is not fully denoised");

    SceneObject obj;
    obj.category = vocab.name(cat);
    obj.feature_code = code;
    obj.action = static_cast<HumanAction>(act);
    obj.layout = layouts[static_cast<size_t>(i)];
    obj.layout.renormalize_rotation();
    obj.asset_id =
        retrieve_object(catalog, book, obj.category, code, obj.layout.s, top_k, warnings)
            .id;
    scene.objects.push_back(std::move(obj));
  }

  for (int i = 0; i < n; ++i) {
    const SceneObject& obj = scene.objects[static_cast<size_t>(i)];
    auto human = place_human(obj.category, obj.action, obj.layout, poses, i);
    if (human) scene.humans.push_back(std::move(*human));
  }
  return scene;
}

}  // namespace roomforge::assembly
