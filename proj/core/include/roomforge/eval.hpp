#pragma once

#include <map>
#include <string>
#include <vector>

#include "roomforge/prompt/parse.hpp"
#include "roomforge/scene.hpp"
#include "roomforge/types.hpp"

namespace roomforge {

// thresholds for the hard-coded relation rules; the same values drive the
// caption generator, so ground-truth scenes satisfy their own captions
struct RelationRuleConfig {
  // maximum horizontal centroid distance for the "closely" variants, meters
  double close_distance = 1.0;
  // dead zone half width around the reference on each horizontal axis, meters
  double axis_epsilon = 0.05;
  // vertical slack allowed when deciding above/below, meters
  double vertical_margin = 0.05;
  // reserved for orientation-aware rule variants; the axis-aligned rules
  // shipped here do not read it, but configs carrying it stay valid
  double facing_tolerance = 0.7853981633974483;
};

// true when `subject` stands in relation `p` to `reference`. The directional
// tests compare world-frame centroids, which makes the rules exactly
// symmetric: check_relation(a, b, p) == check_relation(b, a, inverse(p)),
// and at most one member of each inverse pair can hold for a given pair.
//   LeftOf      subject centroid more than epsilon to the -x of reference
//   RightOf     ... +x ...
//   InFrontOf   ... +y ...
//   Behind      ... -y ...
//   Closely*    the directional test plus horizontal centroid distance
//               under close_distance
//   Above/Below subject's vertical interval entirely beyond the reference's
//               top/bottom within vertical_margin, subject centroid strictly
//               higher/lower, and overlapping footprints
//   None        no other predicate holds
bool check_relation(const Layout& reference, const Layout& subject,
                    RelationPredicate p, const RelationRuleConfig& cfg = {});

// the most specific true predicate for (reference, subject): above/below
// first, then the dominant horizontal axis (x wins ties) as a closely
// variant when within close_distance, then the plain direction, else None;
// the result always passes check_relation
RelationPredicate dominant_relation(const Layout& reference, const Layout& subject,
                                    const RelationRuleConfig& cfg = {});

// fraction of prompt triplets realized by some pair of distinct scene
// objects carrying the named categories; 1.0 for an empty triplet list
double irecall(const std::vector<prompt::Triplet>& triplets, const Scene& scene,
               const RelationRuleConfig& cfg = {});

struct SceneStats {
  // distinct object pairs whose boxes strictly interpenetrate
  int object_collisions = 0;
  // (human, object) pairs that interpenetrate, the human's own contact
  // object excepted
  int human_object_violations = 0;
  std::map<std::string, int> category_histogram;
};

SceneStats scene_stats(const Scene& scene);

// one evaluated scene in a report
struct EvalRow {
  std::string id;
  double irecall = 0.0;
  SceneStats stats;
};

// machine-readable report: {"scenes": [...], "summary": {...}} with mean
// irecall/collisions/violations in the summary
std::string eval_report_json(const std::vector<EvalRow>& rows);

// the same report as an aligned monospace table with a summary line
std::string eval_report_table(const std::vector<EvalRow>& rows);

}  // namespace roomforge
