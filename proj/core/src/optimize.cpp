#include "roomforge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roomforge/errors.hpp"
#include "roomforge/geometry.hpp"

namespace roomforge {

const char* to_string(RefineRule r) {
  switch (r) {
    case RefineRule::MovedSameCategory: return "moved_same_category";
    case RefineRule::MovedInGroup: return "moved_in_group";
    case RefineRule::Removed: return "removed";
    case RefineRule::KeptBelowThreshold: return "kept_below_threshold";
  }
  return "unknown";
}

int OptimizationReport::moved() const {
  int n = 0;
  for (const auto& a : actions)
    if (a.rule == RefineRule::MovedSameCategory || a.rule == RefineRule::MovedInGroup)
      ++n;
  return n;
}

int OptimizationReport::removed() const {
  int n = 0;
  for (const auto& a : actions)
    if (a.rule == RefineRule::Removed) ++n;
  return n;
}

int OptimizationReport::kept() const {
  int n = 0;
  for (const auto& a : actions)
    if (a.rule == RefineRule::KeptBelowThreshold) ++n;
  return n;
}

bool OptimizationReport::settled() const { return moved() == 0 && removed() == 0; }

namespace {

constexpr double kMoveResolution = 0.01;  // meters

// minimal clearing translation of `obj` along the horizontal ray away from
// the human, quantized by binary refinement; false when no tested multiple of
// the step clears within the attempt budget
bool resolve_by_moving(const OrientedBox& human, Layout& obj,
                       const OptimizerConfig& cfg, std::array<double, 3>* displacement) {
  double dx = obj.t[0] - human.center[0];
  double dy = obj.t[1] - human.center[1];
  double len = std::hypot(dx, dy);
  if (len < 1e-9) {
    dx = 1.0;  // coincident centroids: push along +x for a deterministic result
    dy = 0.0;
  } else {
    dx /= len;
    dy /= len;
  }

  auto box_at = [&](double dist) {
    Layout moved = obj;
    moved.t[0] += dx * dist;
    moved.t[1] += dy * dist;
    return OrientedBox::from_layout(moved);
  };

  double clear = -1.0;
  double blocked = 0.0;  // distance 0 is intersecting by precondition
  for (int k = 1; k <= cfg.max_move_attempts; ++k) {
    double dist = k * cfg.max_move_step;
    if (!boxes_intersect_3d(human, box_at(dist))) {
      clear = dist;
      blocked = (k - 1) * cfg.max_move_step;
      break;
    }
  }
  if (clear < 0.0) return false;

  while (clear - blocked > kMoveResolution) {
    double mid = 0.5 * (blocked + clear);
    if (boxes_intersect_3d(human, box_at(mid)))
      blocked = mid;
    else
      clear = mid;
  }

  obj.t[0] += dx * clear;
  obj.t[1] += dy * clear;
  if (displacement) *displacement = {dx * clear, dy * clear, 0.0};
  return true;
}

}  // namespace

OptimizeOutcome optimize_scene(const Scene& scene, const FunctionalGroups& groups,
                               const OptimizerConfig& cfg) {
  if (cfg.beta < 0.0) throw ConfigError("overlap threshold must be non-negative");
  if (cfg.max_move_step <= 0.0) throw ConfigError("move step must be positive");
  if (cfg.max_move_attempts < 1) throw ConfigError("need at least one move attempt");

  const int n = static_cast<int>(scene.objects.size());
  const int q = static_cast<int>(scene.humans.size());
  for (const PlacedHuman& h : scene.humans)
    if (h.contact_object_index < 0 || h.contact_object_index >= n)
      throw Error("human contact index out of range");

  OptimizeOutcome out;
  out.scene = scene;
  std::vector<bool> object_alive(static_cast<size_t>(n), true);
  std::vector<bool> human_alive(static_cast<size_t>(q), true);
  std::vector<bool> moved_this_pass(static_cast<size_t>(n), false);

  auto remove_object = [&](int j) {
    object_alive[static_cast<size_t>(j)] = false;
    for (int k = 0; k < q; ++k)
      if (human_alive[static_cast<size_t>(k)] &&
          out.scene.humans[static_cast<size_t>(k)].contact_object_index == j)
        human_alive[static_cast<size_t>(k)] = false;
  };

  for (int hi = 0; hi < q; ++hi) {
    if (!human_alive[static_cast<size_t>(hi)]) continue;
    const PlacedHuman& human = out.scene.humans[static_cast<size_t>(hi)];
    const int contact = human.contact_object_index;
    const OrientedBox hbox = human.box();
    const std::string& contact_category =
        out.scene.objects[static_cast<size_t>(contact)].category;

    for (int j = 0; j < n; ++j) {
      if (!object_alive[static_cast<size_t>(j)] || j == contact) continue;
      SceneObject& obj = out.scene.objects[static_cast<size_t>(j)];
      if (!boxes_intersect_3d(hbox, obj.box())) continue;

      const bool same_category = obj.category == contact_category;
      const bool in_group =
          !same_category && groups.contains(contact_category, obj.category);

      if (same_category || in_group) {
        if (in_group && footprint_overlap_area(hbox, obj.box()) < cfg.beta) {
          out.report.actions.push_back(
              {hi, j, RefineRule::KeptBelowThreshold, {0.0, 0.0, 0.0}});
          continue;
        }
        std::array<double, 3> displacement{};
        if (resolve_by_moving(hbox, obj.layout, cfg, &displacement)) {
          moved_this_pass[static_cast<size_t>(j)] = true;
          out.report.actions.push_back(
              {hi, j,
               same_category ? RefineRule::MovedSameCategory : RefineRule::MovedInGroup,
               displacement});
        } else {
          remove_object(j);  // never cleared within the attempt budget
          out.report.actions.push_back({hi, j, RefineRule::Removed, {0.0, 0.0, 0.0}});
        }
      } else {
        // an object moved earlier in this pass is left for the next pass
        // rather than removed, so no object is both moved and removed
        if (moved_this_pass[static_cast<size_t>(j)]) continue;
        remove_object(j);
        out.report.actions.push_back({hi, j, RefineRule::Removed, {0.0, 0.0, 0.0}});
      }
    }
  }

  // compact the survivors and remap human contacts
  std::vector<int> new_index(static_cast<size_t>(n), -1);
  std::vector<SceneObject> objects;
  objects.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (!object_alive[static_cast<size_t>(j)]) continue;
    new_index[static_cast<size_t>(j)] = static_cast<int>(objects.size());
    objects.push_back(std::move(out.scene.objects[static_cast<size_t>(j)]));
  }
  std::vector<PlacedHuman> humans;
  humans.reserve(static_cast<size_t>(q));
  for (int k = 0; k < q; ++k) {
    if (!human_alive[static_cast<size_t>(k)]) continue;
    PlacedHuman h = std::move(out.scene.humans[static_cast<size_t>(k)]);
    h.contact_object_index = new_index[static_cast<size_t>(h.contact_object_index)];
    humans.push_back(std::move(h));
  }
  out.scene.objects = std::move(objects);
  out.scene.humans = std::move(humans);
  return out;
}

RefineOutcome refine_scene(const Scene& scene, const FunctionalGroups& groups,
                           const OptimizerConfig& cfg, int max_passes) {
  if (max_passes < 1) throw ConfigError("refinement needs at least one pass");
  RefineOutcome out;
  out.scene = scene;
  RefinementSummary summary;
  for (int pass = 0; pass < max_passes; ++pass) {
    OptimizeOutcome step = optimize_scene(out.scene, groups, cfg);
    out.scene = std::move(step.scene);
    summary.moved += step.report.moved();
    summary.removed += step.report.removed();
    summary.kept += step.report.kept();
    ++summary.passes;
    bool settled = step.report.settled();
    out.passes.push_back(std::move(step.report));
    if (settled) break;
  }
  out.scene.refinement = summary;
  return out;
}

FunctionalGroups builtin_functional_groups() {
  FunctionalGroups g;
  for (const char* bed : {"double bed", "single bed", "kids bed"})
    g.add(bed, "nightstand");
  for (const char* seat : {"dining chair", "chinese chair", "stool"})
    g.add("dining table", seat);
  for (const char* seat :
       {"sofa", "l shaped sofa", "loveseat sofa", "multi seat sofa", "lazy sofa",
        "chaise longue sofa", "armchair", "lounge chair"})
    g.add("coffee table", seat);
  g.add("desk", "chair");
  g.add("table", "chair");
  g.add("table", "stool");
  g.add("dressing table", "stool");
  g.add("dressing table", "chair");
  return g;
}

std::string functional_groups_to_json(const FunctionalGroups& groups) {
  nlohmann::json j;
  j["groups"] = nlohmann::json::array();
  for (const auto& [a, b] : groups.pairs())
    j["groups"].push_back(nlohmann::json::array({a, b}));
  return j.dump(2) + "\n";
}

FunctionalGroups functional_groups_from_json(const std::string& text,
                                             const std::string& origin) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("groups") || !j["groups"].is_array())
    throw FileFormatError(origin, 0, "functional groups need a 'groups' array");
  FunctionalGroups g;
  for (const auto& pair : j["groups"]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_string())
      throw FileFormatError(origin, 0, "each group entry must be a pair of names");
    g.add(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  return g;
}

FunctionalGroups load_functional_groups(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read functional groups from " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return functional_groups_from_json(buf.str(), path.string());
}

}  // namespace roomforge
