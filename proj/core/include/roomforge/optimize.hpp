#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "roomforge/scene.hpp"
#include "roomforge/types.hpp"

namespace roomforge {

// what one human/object pair led to during a refinement pass
enum class RefineRule {
  MovedSameCategory,   // duplicate of the contact category, pushed clear
  MovedInGroup,        // functional partner overlapping beyond the tolerance
  Removed,             // out-of-group intruder, or a move that never cleared
  KeptBelowThreshold,  // functional partner within the tolerated overlap
};
const char* to_string(RefineRule r);

struct RefineAction {
  int human_index = -1;   // index into the humans of the scene passed in
  int object_index = -1;  // index into the objects of the scene passed in
  RefineRule rule = RefineRule::KeptBelowThreshold;
  std::array<double, 3> displacement{0.0, 0.0, 0.0};
};

struct OptimizationReport {
  std::vector<RefineAction> actions;

  [[nodiscard]] int moved() const;
  [[nodiscard]] int removed() const;
  [[nodiscard]] int kept() const;
  // true when the pass changed nothing (kept-below-threshold entries allowed)
  [[nodiscard]] bool settled() const;
};

struct OptimizeOutcome {
  Scene scene;
  OptimizationReport report;
};

// One sweep of the human-aware collision pass: humans in index order, objects
// in index order.  A human's own contact object is exempt; an object moved
// earlier in the pass is never also removed in the same pass (the next pass
// re-examines it).  Humans never move; an object whose removal orphans its
// human takes the human with it.
OptimizeOutcome optimize_scene(const Scene& scene, const FunctionalGroups& groups,
                               const OptimizerConfig& cfg);

struct RefineOutcome {
  Scene scene;  // carries a RefinementSummary in scene.refinement
  std::vector<OptimizationReport> passes;
};

// Runs optimize_scene to a fixed point, at most max_passes times, stopping
// early once a pass no longer moves or removes anything.
RefineOutcome refine_scene(const Scene& scene, const FunctionalGroups& groups,
                           const OptimizerConfig& cfg, int max_passes = 3);

// category pairs that are allowed to overlap up to the area threshold
FunctionalGroups builtin_functional_groups();
std::string functional_groups_to_json(const FunctionalGroups& groups);
FunctionalGroups functional_groups_from_json(const std::string& text,
                                             const std::string& origin = "<string>");
FunctionalGroups load_functional_groups(const std::filesystem::path& path);

}  // namespace roomforge
