#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roomforge/scene.hpp"
#include "roomforge/types.hpp"

namespace roomforge::assembly {

// rigid body proxy: an upright box in the pose's local frame, centered on the
// local origin in x/y and grounded so the box bottom sits at z = 0
struct HumanPoseAsset {
  std::string pose_id;
  HumanAction action = HumanAction::NoneAction;
  std::array<double, 3> half_extents{};  // meters
};

inline constexpr int kPoseCount = 5;

// the five body proxies plus the category dispatch sets that choose among
// poses sharing one action
class PoseLibrary {
 public:
  static PoseLibrary builtin();
  static PoseLibrary from_json_file(const std::filesystem::path& path);
  [[nodiscard]] std::string to_json() const;

  [[nodiscard]] const std::vector<HumanPoseAsset>& poses() const { return poses_; }
  [[nodiscard]] const HumanPoseAsset& get(const std::string& pose_id) const;

  // sitting at these categories puts the arms on a work surface
  [[nodiscard]] bool seats_at_surface(const std::string& category) const;
  // lying on these categories is a reclined half-lie rather than flat
  [[nodiscard]] bool reclines_on(const std::string& category) const;

 private:
  std::vector<HumanPoseAsset> poses_;
  std::vector<std::string> surface_seat_categories_;
  std::vector<std::string> recline_categories_;
};

// Builds the body proxy for one object, or nothing when the object affords no
// interaction.  Sitting and lying bodies share the object's translation and
// rotation; a touching body stands half a body depth in front of the object's
// facing side, rotated 180 degrees to face it.
std::optional<PlacedHuman> place_human(const std::string& category, HumanAction action,
                                       const Layout& object_layout,
                                       const PoseLibrary& library,
                                       int object_index);

}  // namespace roomforge::assembly
