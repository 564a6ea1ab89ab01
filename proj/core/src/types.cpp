#include "roomforge/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "roomforge/errors.hpp"

namespace roomforge {

CategoryVocabulary::CategoryVocabulary(std::string scene_type_name,
                                       std::vector<std::string> categories)
    : scene_type_name_(std::move(scene_type_name)), categories_(std::move(categories)) {
  if (categories_.empty()) throw Error("vocabulary for " + scene_type_name_ + " is empty");
  std::set<std::string> seen(categories_.begin(), categories_.end());
  if (seen.size() != categories_.size())
    throw Error("vocabulary for " + scene_type_name_ + " has duplicate categories");
}

const std::string& CategoryVocabulary::name(int index) const {
  if (index < 0 || index >= size())
    throw Error("category index " + std::to_string(index) + " out of range for " +
                scene_type_name_);
  return categories_[static_cast<std::size_t>(index)];
}

std::optional<int> CategoryVocabulary::index_of(const std::string& category) const {
  const auto it = std::find(categories_.begin(), categories_.end(), category);
  if (it == categories_.end()) return std::nullopt;
  return static_cast<int>(it - categories_.begin());
}

namespace {

std::vector<std::string> bedroom_categories() {
  return {
      "armchair",      "bookshelf", "cabinet",    "ceiling lamp", "chair",
      "children cabinet", "coffee table", "desk",  "double bed",   "dresser",
      "dressing table", "kids bed",  "nightstand", "pendant lamp", "shelf",
      "single bed",    "sofa",      "stool",      "table",        "tv stand",
      "wardrobe",
  };
}

std::vector<std::string> living_dining_categories() {
  return {
      "armchair",        "bookshelf",    "cabinet",        "ceiling lamp",
      "chaise longue sofa", "chinese chair", "coffee table", "console table",
      "corner side table",  "desk",        "dining chair",   "dining table",
      "l shaped sofa",   "lazy sofa",    "lounge chair",   "loveseat sofa",
      "multi seat sofa", "pendant lamp", "round end table", "shelf",
      "stool",           "tv stand",     "wardrobe",       "wine cabinet",
  };
}

}  // namespace

SceneTypeRegistry SceneTypeRegistry::with_builtins() {
  SceneTypeRegistry reg;
  reg.register_type({SceneType::bedroom(),
                     CategoryVocabulary("bedroom", bedroom_categories()), 3, 12});
  reg.register_type({SceneType::living_room(),
                     CategoryVocabulary("living_room", living_dining_categories()), 3, 21});
  reg.register_type({SceneType::dining_room(),
                     CategoryVocabulary("dining_room", living_dining_categories()), 3, 21});
  return reg;
}

void SceneTypeRegistry::register_type(SceneTypeSpec spec) {
  if (spec.min_objects < 1 || spec.max_objects < spec.min_objects)
    throw Error("scene type " + spec.type.name + " has an invalid object-count range");
  for (const auto& existing : specs_)
    if (existing.type.name == spec.type.name)
      throw Error("scene type " + spec.type.name + " registered twice");
  specs_.push_back(std::move(spec));
}

const SceneTypeSpec& SceneTypeRegistry::get(const std::string& name) const {
  for (const auto& spec : specs_)
    if (spec.type.name == name) return spec;
  throw Error("unknown scene type: " + name);
}

bool SceneTypeRegistry::contains(const std::string& name) const {
  for (const auto& spec : specs_)
    if (spec.type.name == name) return true;
  return false;
}

// ---------------------------------------------------------------------------

RelationPredicate inverse_predicate(RelationPredicate p) {
  switch (p) {
    case RelationPredicate::LeftOf: return RelationPredicate::RightOf;
    case RelationPredicate::RightOf: return RelationPredicate::LeftOf;
    case RelationPredicate::InFrontOf: return RelationPredicate::Behind;
    case RelationPredicate::Behind: return RelationPredicate::InFrontOf;
    case RelationPredicate::CloselyLeftOf: return RelationPredicate::CloselyRightOf;
    case RelationPredicate::CloselyRightOf: return RelationPredicate::CloselyLeftOf;
    case RelationPredicate::CloselyInFrontOf: return RelationPredicate::CloselyBehind;
    case RelationPredicate::CloselyBehind: return RelationPredicate::CloselyInFrontOf;
    case RelationPredicate::Above: return RelationPredicate::Below;
    case RelationPredicate::Below: return RelationPredicate::Above;
    case RelationPredicate::None: return RelationPredicate::None;
  }
  return RelationPredicate::None;
}

const char* to_string(RelationPredicate p) {
  switch (p) {
    case RelationPredicate::LeftOf: return "left_of";
    case RelationPredicate::RightOf: return "right_of";
    case RelationPredicate::InFrontOf: return "in_front_of";
    case RelationPredicate::Behind: return "behind";
    case RelationPredicate::CloselyLeftOf: return "closely_left_of";
    case RelationPredicate::CloselyRightOf: return "closely_right_of";
    case RelationPredicate::CloselyInFrontOf: return "closely_in_front_of";
    case RelationPredicate::CloselyBehind: return "closely_behind";
    case RelationPredicate::Above: return "above";
    case RelationPredicate::Below: return "below";
    case RelationPredicate::None: return "none";
  }
  return "none";
}

std::optional<RelationPredicate> relation_from_string(const std::string& name) {
  for (int i = 0; i < kRelationCount; ++i) {
    const auto p = static_cast<RelationPredicate>(i);
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

const char* to_string(HumanAction a) {
  switch (a) {
    case HumanAction::Sitting: return "sitting";
    case HumanAction::Lying: return "lying";
    case HumanAction::Touching: return "touching";
    case HumanAction::NoneAction: return "none";
  }
  return "none";
}

std::optional<HumanAction> action_from_string(const std::string& name) {
  for (int i = 0; i < kActionCount; ++i) {
    const auto a = static_cast<HumanAction>(i);
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

SceneGraph::SceneGraph(std::string scene_type_name, int node_count)
    : scene_type_name_(std::move(scene_type_name)),
      nodes_(static_cast<std::size_t>(node_count)),
      edges_(static_cast<std::size_t>(node_count) * node_count, RelationPredicate::None),
      edge_masked_(static_cast<std::size_t>(node_count) * node_count, 0) {
  if (node_count < 0) throw Error("negative node count");
}

RelationPredicate SceneGraph::edge(int i, int j) const {
  return edges_[static_cast<std::size_t>(at(i, j))];
}

void SceneGraph::set_edge(int i, int j, RelationPredicate p) {
  edges_[static_cast<std::size_t>(at(i, j))] = p;
}

void SceneGraph::set_edge_symmetric(int i, int j, RelationPredicate p) {
  set_edge(i, j, p);
  set_edge(j, i, inverse_predicate(p));
  set_edge_masked(i, j, false);
  set_edge_masked(j, i, false);
}

bool SceneGraph::edge_masked(int i, int j) const {
  return edge_masked_[static_cast<std::size_t>(at(i, j))] != 0;
}

void SceneGraph::set_edge_masked(int i, int j, bool masked) {
  edge_masked_[static_cast<std::size_t>(at(i, j))] = masked ? 1 : 0;
}

bool SceneGraph::is_clean() const {
  const int n = size();
  for (const auto& node : nodes_)
    if (!node.fully_observed()) return false;
  for (int i = 0; i < n; ++i) {
    if (edge(i, i) != RelationPredicate::None) return false;
    for (int j = 0; j < n; ++j) {
      if (edge_masked(i, j)) return false;
      if (edge(j, i) != inverse_predicate(edge(i, j))) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

double Layout::yaw() const { return std::atan2(rot_sin, rot_cos); }

void Layout::renormalize_rotation() {
  const double norm = std::sqrt(rot_cos * rot_cos + rot_sin * rot_sin);
  if (norm < 1e-12) {
    rot_cos = 1.0;
    rot_sin = 0.0;
    return;
  }
  rot_cos /= norm;
  rot_sin /= norm;
}

bool Layout::valid() const {
  for (double v : s)
    if (!(v > 0.0)) return false;
  for (double v : t)
    if (!std::isfinite(v)) return false;
  const double norm2 = rot_cos * rot_cos + rot_sin * rot_sin;
  return std::abs(norm2 - 1.0) <= 1e-6;
}

Layout make_layout(double x, double y, double z, double sx, double sy, double sz,
                   double yaw_radians) {
  Layout l;
  l.t = {x, y, z};
  l.s = {sx, sy, sz};
  l.rot_cos = std::cos(yaw_radians);
  l.rot_sin = std::sin(yaw_radians);
  return l;
}

// ---------------------------------------------------------------------------

void FunctionalGroups::add(const std::string& a, const std::string& b) {
  if (contains(a, b)) return;
  pairs_.emplace_back(std::min(a, b), std::max(a, b));
}

bool FunctionalGroups::contains(const std::string& a, const std::string& b) const {
  const auto key = std::make_pair(std::min(a, b), std::max(a, b));
  return std::find(pairs_.begin(), pairs_.end(), key) != pairs_.end();
}

}  // namespace roomforge
