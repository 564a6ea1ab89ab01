#include "roomforge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "roomforge/errors.hpp"
#include "roomforge/geometry.hpp"

namespace roomforge {

namespace {

void validate_rules(const RelationRuleConfig& cfg) {
  if (!(cfg.close_distance > 0.0) || !(cfg.axis_epsilon > 0.0) ||
      !(cfg.vertical_margin > 0.0) || !(cfg.facing_tolerance > 0.0))
    throw ConfigError("relation rule thresholds must be positive");
}

bool close_enough(const Layout& reference, const Layout& subject,
                  const RelationRuleConfig& cfg) {
  double dx = subject.t[0] - reference.t[0];
  double dy = subject.t[1] - reference.t[1];
  return std::hypot(dx, dy) < cfg.close_distance;
}

bool vertically_separated(const Layout& reference, const Layout& subject, bool above,
                          const RelationRuleConfig& cfg) {
  OrientedBox rbox = OrientedBox::from_layout(reference);
  OrientedBox sbox = OrientedBox::from_layout(subject);
  bool interval = above ? sbox.zmin() > rbox.zmax() - cfg.vertical_margin
                        : sbox.zmax() < rbox.zmin() + cfg.vertical_margin;
  // the strict centroid comparison keeps Above and Below mutually exclusive
  // even for paper-thin boxes that fit inside the margin
  bool centroid = above ? subject.t[2] > reference.t[2] : subject.t[2] < reference.t[2];
  return interval && centroid && footprint_overlap_area(rbox, sbox) > 0.0;
}

}  // namespace

bool check_relation(const Layout& reference, const Layout& subject,
                    RelationPredicate p, const RelationRuleConfig& cfg) {
  validate_rules(cfg);
  double dx = subject.t[0] - reference.t[0];
  double dy = subject.t[1] - reference.t[1];
  switch (p) {
    case RelationPredicate::LeftOf: return dx < -cfg.axis_epsilon;
    case RelationPredicate::RightOf: return dx > cfg.axis_epsilon;
    case RelationPredicate::InFrontOf: return dy > cfg.axis_epsilon;
    case RelationPredicate::Behind: return dy < -cfg.axis_epsilon;
    case RelationPredicate::CloselyLeftOf:
      return dx < -cfg.axis_epsilon && close_enough(reference, subject, cfg);
    case RelationPredicate::CloselyRightOf:
      return dx > cfg.axis_epsilon && close_enough(reference, subject, cfg);
    case RelationPredicate::CloselyInFrontOf:
      return dy > cfg.axis_epsilon && close_enough(reference, subject, cfg);
    case RelationPredicate::CloselyBehind:
      return dy < -cfg.axis_epsilon && close_enough(reference, subject, cfg);
    case RelationPredicate::Above:
      return vertically_separated(reference, subject, true, cfg);
    case RelationPredicate::Below:
      return vertically_separated(reference, subject, false, cfg);
    case RelationPredicate::None: {
      for (int q = 0; q < kRelationCount; ++q) {
        auto other = static_cast<RelationPredicate>(q);
        if (other == RelationPredicate::None) continue;
        if (check_relation(reference, subject, other, cfg)) return false;
      }
      return true;
    }
  }
  return false;
}

RelationPredicate dominant_relation(const Layout& reference, const Layout& subject,
                                    const RelationRuleConfig& cfg) {
  validate_rules(cfg);
  if (check_relation(reference, subject, RelationPredicate::Above, cfg))
    return RelationPredicate::Above;
  if (check_relation(reference, subject, RelationPredicate::Below, cfg))
    return RelationPredicate::Below;

  double dx = subject.t[0] - reference.t[0];
  double dy = subject.t[1] - reference.t[1];
  if (std::max(std::abs(dx), std::abs(dy)) <= cfg.axis_epsilon)
    return RelationPredicate::None;

  RelationPredicate dir;
  if (std::abs(dx) >= std::abs(dy))
    dir = dx < 0.0 ? RelationPredicate::LeftOf : RelationPredicate::RightOf;
  else
    dir = dy > 0.0 ? RelationPredicate::InFrontOf : RelationPredicate::Behind;

  if (close_enough(reference, subject, cfg)) {
    switch (dir) {
      case RelationPredicate::LeftOf: return RelationPredicate::CloselyLeftOf;
      case RelationPredicate::RightOf: return RelationPredicate::CloselyRightOf;
      case RelationPredicate::InFrontOf: return RelationPredicate::CloselyInFrontOf;
      default: return RelationPredicate::CloselyBehind;
    }
  }
  return dir;
}

double irecall(const std::vector<prompt::Triplet>& triplets, const Scene& scene,
               const RelationRuleConfig& cfg) {
  validate_rules(cfg);
  if (triplets.empty()) return 1.0;
  int satisfied = 0;
  const auto& objects = scene.objects;
  for (const prompt::Triplet& t : triplets) {
    bool hit = false;
    for (size_t i = 0; i < objects.size() && !hit; ++i) {
      if (objects[i].category != t.subject) continue;
      for (size_t j = 0; j < objects.size() && !hit; ++j) {
        if (i == j || objects[j].category != t.object) continue;
        // triplet reads "subject is predicate of object"
        if (check_relation(objects[j].layout, objects[i].layout, t.predicate, cfg))
          hit = true;
      }
    }
    if (hit) ++satisfied;
  }
  return static_cast<double>(satisfied) / static_cast<double>(triplets.size());
}

SceneStats scene_stats(const Scene& scene) {
  SceneStats stats;
  const auto& objects = scene.objects;
  for (size_t i = 0; i < objects.size(); ++i) {
    ++stats.category_histogram[objects[i].category];
    for (size_t j = i + 1; j < objects.size(); ++j)
      if (boxes_intersect_3d(objects[i].box(), objects[j].box()))
        ++stats.object_collisions;
  }
  for (const PlacedHuman& h : scene.humans) {
    OrientedBox hbox = h.box();
    for (size_t j = 0; j < objects.size(); ++j) {
      if (static_cast<int>(j) == h.contact_object_index) continue;
      if (boxes_intersect_3d(hbox, objects[j].box()))
        ++stats.human_object_violations;
    }
  }
  return stats;
}

namespace {

struct Summary {
  double mean_irecall = 0.0;
  double mean_collisions = 0.0;
  double mean_violations = 0.0;
};

Summary summarize(const std::vector<EvalRow>& rows) {
  Summary s;
  if (rows.empty()) return s;
  for (const EvalRow& r : rows) {
    s.mean_irecall += r.irecall;
    s.mean_collisions += r.stats.object_collisions;
    s.mean_violations += r.stats.human_object_violations;
  }
  double n = static_cast<double>(rows.size());
  s.mean_irecall /= n;
  s.mean_collisions /= n;
  s.mean_violations /= n;
  return s;
}

}  // namespace

std::string eval_report_json(const std::vector<EvalRow>& rows) {
  nlohmann::json j;
  j["scenes"] = nlohmann::json::array();
  for (const EvalRow& r : rows) {
    nlohmann::json row;
    row["id"] = r.id;
    row["irecall"] = r.irecall;
    row["object_collisions"] = r.stats.object_collisions;
    row["human_object_violations"] = r.stats.human_object_violations;
    row["category_histogram"] = r.stats.category_histogram;
    j["scenes"].push_back(row);
  }
  Summary s = summarize(rows);
  j["summary"]["scene_count"] = rows.size();
  j["summary"]["mean_irecall"] = s.mean_irecall;
  j["summary"]["mean_object_collisions"] = s.mean_collisions;
  j["summary"]["mean_human_object_violations"] = s.mean_violations;
  return j.dump(2) + "\n";
}

std::string eval_report_table(const std::vector<EvalRow>& rows) {
  size_t id_width = 5;
  for (const EvalRow& r : rows) id_width = std::max(id_width, r.id.size());

  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s  %8s  %10s  %10s\n",
                static_cast<int>(id_width), "scene", "irecall", "collisions",
                "violations");
  out << line;
  out << std::string(id_width + 2 + 8 + 2 + 10 + 2 + 10, '-') << "\n";
  for (const EvalRow& r : rows) {
    std::snprintf(line, sizeof(line), "%-*s  %8.4f  %10d  %10d\n",
                  static_cast<int>(id_width), r.id.c_str(), r.irecall,
                  r.stats.object_collisions, r.stats.human_object_violations);
    out << line;
  }
  Summary s = summarize(rows);
  std::snprintf(line, sizeof(line), "%-*s  %8.4f  %10.2f  %10.2f\n",
                static_cast<int>(id_width), "mean", s.mean_irecall, s.mean_collisions,
                s.mean_violations);
  out << line;
  return out.str();
}

}  // namespace roomforge
