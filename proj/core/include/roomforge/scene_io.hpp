#pragma once

#include <filesystem>
#include <string>

#include "roomforge/scene.hpp"

namespace roomforge {

// canonical scene serialization; field order is fixed and floats carry six
// decimals, so equal scenes produce byte-identical text
std::string write_scene_json(const Scene& scene, bool pretty = true);
Scene read_scene_json(const std::string& text, const std::string& origin = "<string>");

void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

// shared helpers for other serializers
void write_layout_fields(class JsonWriter& w, const Layout& l);

}  // namespace roomforge
