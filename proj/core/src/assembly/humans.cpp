#include "roomforge/assembly/humans.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "roomforge/errors.hpp"

namespace roomforge::assembly {

namespace {

constexpr const char* kSitHandsAtSides = "SitHandsAtSides";
constexpr const char* kSitArmsOnTable = "SitArmsOnTable";
constexpr const char* kLieHandsBehindHead = "LieHandsBehindHead";
constexpr const char* kHalfLie = "HalfLie";
constexpr const char* kStandTouch = "StandTouch";

void validate_library(const std::vector<HumanPoseAsset>& poses) {
  if (static_cast<int>(poses.size()) != kPoseCount)
    throw Error("pose library must hold exactly " + std::to_string(kPoseCount) +
                " poses");
  for (const char* required :
       {kSitHandsAtSides, kSitArmsOnTable, kLieHandsBehindHead, kHalfLie, kStandTouch}) {
    bool found = false;
    for (const auto& p : poses)
      if (p.pose_id == required) found = true;
    if (!found) throw Error(std::string("pose library is missing ") + required);
  }
  for (const auto& p : poses)
    for (double h : p.half_extents)
      if (!(h > 0.0) || !std::isfinite(h))
        throw Error("pose '" + p.pose_id + "' needs positive half extents");
}

}  // namespace

PoseLibrary PoseLibrary::builtin() {
  PoseLibrary lib;
  lib.poses_ = {
      {kSitHandsAtSides, HumanAction::Sitting, {0.25, 0.30, 0.65}},
      {kSitArmsOnTable, HumanAction::Sitting, {0.25, 0.42, 0.62}},
      {kLieHandsBehindHead, HumanAction::Lying, {0.30, 0.95, 0.18}},
      {kHalfLie, HumanAction::Lying, {0.30, 0.75, 0.40}},
      {kStandTouch, HumanAction::Touching, {0.28, 0.22, 0.87}},
  };
  lib.surface_seat_categories_ = {"chair", "chinese chair", "dining chair", "stool"};
  lib.recline_categories_ = {"chaise longue sofa", "l shaped sofa",    "lazy sofa",
                             "lounge chair",       "loveseat sofa",    "multi seat sofa",
                             "sofa"};
  validate_library(lib.poses_);
  return lib;
}

std::string PoseLibrary::to_json() const {
  nlohmann::json j;
  j["poses"] = nlohmann::json::array();
  for (const auto& p : poses_) {
    nlohmann::json e;
    e["pose_id"] = p.pose_id;
    e["action"] = to_string(p.action);
    e["half_extents"] = p.half_extents;
    j["poses"].push_back(std::move(e));
  }
  j["surface_seat_categories"] = surface_seat_categories_;
  j["recline_categories"] = recline_categories_;
  return j.dump(2) + "\n";
}

PoseLibrary PoseLibrary::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read pose library from " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.contains("poses") || !j["poses"].is_array())
    throw FileFormatError(path.string(), 0, "pose library needs a 'poses' array");

  PoseLibrary lib;
  for (const auto& e : j["poses"]) {
    if (!e.contains("pose_id") || !e.contains("action") || !e.contains("half_extents"))
      throw FileFormatError(path.string(), 0,
                            "pose entry needs pose_id/action/half_extents");
    HumanPoseAsset p;
    p.pose_id = e["pose_id"].get<std::string>();
    auto action = action_from_string(e["action"].get<std::string>());
    if (!action)
      throw FileFormatError(path.string(), 0,
                            "unknown action '" + e["action"].get<std::string>() + "'");
    p.action = *action;
    auto h = e["half_extents"].get<std::vector<double>>();
    if (h.size() != 3)
      throw FileFormatError(path.string(), 0, "half_extents needs three entries");
    std::copy(h.begin(), h.end(), p.half_extents.begin());
    lib.poses_.push_back(std::move(p));
  }
  if (j.contains("surface_seat_categories"))
    lib.surface_seat_categories_ =
        j["surface_seat_categories"].get<std::vector<std::string>>();
  if (j.contains("recline_categories"))
    lib.recline_categories_ = j["recline_categories"].get<std::vector<std::string>>();
  try {
    validate_library(lib.poses_);
  } catch (const Error& e) {
    throw FileFormatError(path.string(), 0, e.what());
  }
  return lib;
}

const HumanPoseAsset& PoseLibrary::get(const std::string& pose_id) const {
  for (const auto& p : poses_)
    if (p.pose_id == pose_id) return p;
  throw Error("unknown pose '" + pose_id + "'");
}

bool PoseLibrary::seats_at_surface(const std::string& category) const {
  return std::find(surface_seat_categories_.begin(), surface_seat_categories_.end(),
                   category) != surface_seat_categories_.end();
}

bool PoseLibrary::reclines_on(const std::string& category) const {
  return std::find(recline_categories_.begin(), recline_categories_.end(), category) !=
         recline_categories_.end();
}

std::optional<PlacedHuman> place_human(const std::string& category, HumanAction action,
                                       const Layout& object_layout,
                                       const PoseLibrary& library, int object_index) {
  if (action == HumanAction::NoneAction) return std::nullopt;

  std::string pose_id;
  switch (action) {
    case HumanAction::Sitting:
      pose_id = library.seats_at_surface(category) ? kSitArmsOnTable : kSitHandsAtSides;
      break;
    case HumanAction::Lying:
      pose_id = library.reclines_on(category) ? kHalfLie : kLieHandsBehindHead;
      break;
    case HumanAction::Touching:
      pose_id = kStandTouch;
      break;
    case HumanAction::NoneAction:
      return std::nullopt;
  }
  const HumanPoseAsset& pose = library.get(pose_id);

  PlacedHuman h;
  h.pose_id = pose_id;
  h.contact_object_index = object_index;
  h.layout.s = pose.half_extents;

  if (action == HumanAction::Touching) {
    // stand in front of the object's facing side (local +y), turned back
    // toward it
    double yaw = object_layout.yaw();
    double offset = object_layout.s[1] + pose.half_extents[1];
    h.layout.t[0] = object_layout.t[0] - std::sin(yaw) * offset;
    h.layout.t[1] = object_layout.t[1] + std::cos(yaw) * offset;
    h.layout.t[2] = pose.half_extents[2];  // feet on the floor
    double facing = yaw + std::numbers::pi;
    h.layout.rot_cos = std::cos(facing);
    h.layout.rot_sin = std::sin(facing);
  } else {
    h.layout.t = object_layout.t;
    h.layout.rot_cos = object_layout.rot_cos;
    h.layout.rot_sin = object_layout.rot_sin;
  }
  h.layout.renormalize_rotation();
  return h;
}

}  // namespace roomforge::assembly
