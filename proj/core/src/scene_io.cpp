#include "roomforge/scene_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "roomforge/errors.hpp"
#include "roomforge/json_writer.hpp"

namespace roomforge {

namespace {

using nlohmann::json;

long line_of_offset(const std::string& text, std::size_t byte) {
  long line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Layout layout_from_json(const json& j) {
  Layout l;
  const auto& t = j.at("t");
  const auto& s = j.at("s");
  const auto& r = j.at("rot");
  for (int i = 0; i < 3; ++i) {
    l.t[static_cast<std::size_t>(i)] = t.at(static_cast<std::size_t>(i)).get<double>();
    l.s[static_cast<std::size_t>(i)] = s.at(static_cast<std::size_t>(i)).get<double>();
  }
  l.rot_cos = r.at(0).get<double>();
  l.rot_sin = r.at(1).get<double>();
  return l;
}

}  // namespace

void write_layout_fields(JsonWriter& w, const Layout& l) {
  w.begin_object();
  w.key("t");
  w.begin_array();
  for (const double v : l.t) w.value(v);
  w.end_array();
  w.key("s");
  w.begin_array();
  for (const double v : l.s) w.value(v);
  w.end_array();
  w.key("rot");
  w.begin_array();
  w.value(l.rot_cos);
  w.value(l.rot_sin);
  w.end_array();
  w.end_object();
}

std::string write_scene_json(const Scene& scene, bool pretty) {
  JsonWriter w(pretty);
  w.begin_object();
  w.key("scene_type");
  w.value(scene.scene_type);
  w.key("objects");
  w.begin_array();
  for (const auto& obj : scene.objects) {
    w.begin_object();
    w.key("category");
    w.value(obj.category);
    w.key("feature_code");
    w.value_int(obj.feature_code);
    w.key("action");
    w.value(to_string(obj.action));
    w.key("layout");
    write_layout_fields(w, obj.layout);
    if (!obj.asset_id.empty()) {
      w.key("asset_id");
      w.value(obj.asset_id);
    }
    w.end_object();
  }
  w.end_array();
  w.key("humans");
  w.begin_array();
  for (const auto& h : scene.humans) {
    w.begin_object();
    w.key("pose_id");
    w.value(h.pose_id);
    w.key("contact_object_index");
    w.value_int(h.contact_object_index);
    w.key("layout");
    write_layout_fields(w, h.layout);
    w.end_object();
  }
  w.end_array();
  w.key("meta");
  w.begin_object();
  w.key("seed");
  w.value_uint(scene.seed);
  w.key("prompt");
  w.value(scene.prompt);
  if (scene.refinement) {
    w.key("optimization");
    w.begin_object();
    w.key("moved");
    w.value_int(scene.refinement->moved);
    w.key("removed");
    w.value_int(scene.refinement->removed);
    w.key("kept");
    w.value_int(scene.refinement->kept);
    w.key("passes");
    w.value_int(scene.refinement->passes);
    w.end_object();
  }
  w.end_object();
  w.end_object();
  std::string out = w.str();
  if (pretty) out += '\n';
  return out;
}

Scene read_scene_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FileFormatError(origin, line_of_offset(text, e.byte), e.what());
  }
  try {
    Scene scene;
    scene.scene_type = j.at("scene_type").get<std::string>();
    for (const auto& jo : j.at("objects")) {
      SceneObject obj;
      obj.category = jo.at("category").get<std::string>();
      obj.feature_code = jo.at("feature_code").get<int>();
      const auto action = action_from_string(jo.at("action").get<std::string>());
      if (!action) throw Error("unknown action " + jo.at("action").get<std::string>());
      obj.action = *action;
      obj.layout = layout_from_json(jo.at("layout"));
      if (jo.contains("asset_id")) obj.asset_id = jo.at("asset_id").get<std::string>();
      scene.objects.push_back(std::move(obj));
    }
    for (const auto& jh : j.at("humans")) {
      PlacedHuman h;
      h.pose_id = jh.at("pose_id").get<std::string>();
      h.contact_object_index = jh.at("contact_object_index").get<int>();
      h.layout = layout_from_json(jh.at("layout"));
      scene.humans.push_back(std::move(h));
    }
    const auto& meta = j.at("meta");
    scene.seed = meta.at("seed").get<std::uint64_t>();
    scene.prompt = meta.at("prompt").get<std::string>();
    if (meta.contains("optimization")) {
      RefinementSummary s;
      const auto& jo = meta.at("optimization");
      s.moved = jo.at("moved").get<int>();
      s.removed = jo.at("removed").get<int>();
      s.kept = jo.at("kept").get<int>();
      s.passes = jo.at("passes").get<int>();
      scene.refinement = s;
    }
    return scene;
  } catch (const json::exception& e) {
    throw FileFormatError(origin, 0, std::string("scene schema: ") + e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << write_scene_json(scene);
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_scene_json(ss.str(), path.string());
}

}  // namespace roomforge
