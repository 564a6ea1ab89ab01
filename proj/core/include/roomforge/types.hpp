#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace roomforge {

// ---------------------------------------------------------------------------
// scene types and category vocabularies

struct SceneType {
  enum class Id { Bedroom, LivingRoom, DiningRoom, Custom };
  Id id = Id::Custom;
  std::string name;

  static SceneType bedroom() { return {Id::Bedroom, "bedroom"}; }
  static SceneType living_room() { return {Id::LivingRoom, "living_room"}; }
  static SceneType dining_room() { return {Id::DiningRoom, "dining_room"}; }

  bool operator==(const SceneType& o) const { return name == o.name; }
};

// category names are lowercase, may contain spaces ("double bed")
class CategoryVocabulary {
 public:
  CategoryVocabulary() = default;
  CategoryVocabulary(std::string scene_type_name, std::vector<std::string> categories);

  [[nodiscard]] int size() const { return static_cast<int>(categories_.size()); }
  [[nodiscard]] const std::string& name(int index) const;
  [[nodiscard]] const std::vector<std::string>& names() const { return categories_; }
  [[nodiscard]] std::optional<int> index_of(const std::string& category) const;
  [[nodiscard]] const std::string& scene_type_name() const { return scene_type_name_; }

 private:
  std::string scene_type_name_;
  std::vector<std::string> categories_;
};

struct SceneTypeSpec {
  SceneType type;
  CategoryVocabulary vocab;
  int min_objects = 3;
  int max_objects = 12;
};

// built-in bedroom / living room / dining room specs plus user registrations
class SceneTypeRegistry {
 public:
  static SceneTypeRegistry with_builtins();

  void register_type(SceneTypeSpec spec);
  [[nodiscard]] const SceneTypeSpec& get(const std::string& name) const;
  [[nodiscard]] bool contains(const std::string& name) const;
  [[nodiscard]] const std::vector<SceneTypeSpec>& all() const { return specs_; }

 private:
  std::vector<SceneTypeSpec> specs_;
};

// ---------------------------------------------------------------------------
// relations

enum class RelationPredicate : std::uint8_t {
  LeftOf = 0,
  RightOf = 1,
  InFrontOf = 2,
  Behind = 3,
  CloselyLeftOf = 4,
  CloselyRightOf = 5,
  CloselyInFrontOf = 6,
  CloselyBehind = 7,
  Above = 8,
  Below = 9,
  None = 10,
};

inline constexpr int kRelationCount = 11;

RelationPredicate inverse_predicate(RelationPredicate p);
const char* to_string(RelationPredicate p);
std::optional<RelationPredicate> relation_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// human actions

enum class HumanAction : std::uint8_t {
  Sitting = 0,
  Lying = 1,
  Touching = 2,
  NoneAction = 3,
};

inline constexpr int kActionCount = 4;

const char* to_string(HumanAction a);
std::optional<HumanAction> action_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// scene graph

// attribute slots may be masked while a graph is mid-diffusion; a masked slot
// carries no semantic value and its payload must not be read
struct ObjectNode {
  int category = 0;
  int feature_code = 0;
  HumanAction action = HumanAction::NoneAction;
  bool category_masked = false;
  bool feature_masked = false;
  bool action_masked = false;

  [[nodiscard]] bool fully_observed() const {
    return !category_masked && !feature_masked && !action_masked;
  }
};

// dense ordered-pair relation matrix; edge(i, j) == p reads "node i is p of
// node j", so edge(j, i) holds the inverse for a clean graph
class SceneGraph {
 public:
  SceneGraph() = default;
  SceneGraph(std::string scene_type_name, int node_count);

  [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const std::string& scene_type_name() const { return scene_type_name_; }

  std::vector<ObjectNode>& nodes() { return nodes_; }
  [[nodiscard]] const std::vector<ObjectNode>& nodes() const { return nodes_; }

  [[nodiscard]] RelationPredicate edge(int i, int j) const;
  void set_edge(int i, int j, RelationPredicate p);
  // sets edge(i, j) = p and edge(j, i) = inverse(p)
  void set_edge_symmetric(int i, int j, RelationPredicate p);

  [[nodiscard]] bool edge_masked(int i, int j) const;
  void set_edge_masked(int i, int j, bool masked);

  // no masked slots, diagonal None, inverse symmetry on every pair
  [[nodiscard]] bool is_clean() const;

 private:
  [[nodiscard]] int at(int i, int j) const { return i * size() + j; }
  std::string scene_type_name_;
  std::vector<ObjectNode> nodes_;
  std::vector<RelationPredicate> edges_;
  std::vector<std::uint8_t> edge_masked_;
};

// ---------------------------------------------------------------------------
// layouts

// world-frame placement: t center (m), s half extents (m), yaw as (cos, sin)
struct Layout {
  std::array<double, 3> t{0.0, 0.0, 0.0};
  std::array<double, 3> s{0.1, 0.1, 0.1};
  double rot_cos = 1.0;
  double rot_sin = 0.0;

  [[nodiscard]] double yaw() const;
  // scales (cos, sin) back onto the unit circle; zero vector becomes (1, 0)
  void renormalize_rotation();
  // true when extents are positive and the rotation is unit within 1e-6
  [[nodiscard]] bool valid() const;
};

Layout make_layout(double x, double y, double z, double sx, double sy, double sz,
                   double yaw_radians);

// ---------------------------------------------------------------------------
// functional groups

// unordered category pairs that commonly operate together (bed + nightstand);
// membership is symmetric
class FunctionalGroups {
 public:
  void add(const std::string& a, const std::string& b);
  [[nodiscard]] bool contains(const std::string& a, const std::string& b) const;
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& pairs() const {
    return pairs_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

// ---------------------------------------------------------------------------
// scene refinement configuration

struct OptimizerConfig {
  double beta = 0.05;          // tolerated in-group footprint overlap, m^2
  double max_move_step = 0.25; // translation quantum, m
  int max_move_attempts = 100; // step multiples tried before giving up
  std::uint64_t seed = 0;
};

}  // namespace roomforge
