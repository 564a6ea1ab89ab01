#include "roomforge/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "roomforge/assembly/catalog.hpp"
#include "roomforge/assembly/codebook.hpp"
#include "roomforge/errors.hpp"
#include "roomforge/eval.hpp"
#include "roomforge/geometry.hpp"
#include "roomforge/json_writer.hpp"
#include "roomforge/prompt/actions.hpp"
#include "roomforge/prompt/lexicon.hpp"
#include "roomforge/rng.hpp"
#include "roomforge/scene_io.hpp"

namespace roomforge::corpus {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// six-decimal snap so in-memory values match the canonical serialization
double snap(double v) { return std::round(v * 1e6) / 1e6; }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void append_double(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g;", v);
  s += buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// templates

TemplateLibrary TemplateLibrary::builtin() {
  TemplateLibrary lib;
  auto item = [](std::string category, double x, double y, double yaw, double prob,
                 double action_prob, double z = -1.0) {
    return TemplateItem{std::move(category), x, y, z, yaw, prob, action_prob};
  };

  lib.by_scene_type["bedroom"] = {
      {"sleep_suite",
       {
           item("double bed", 0.00, 1.25, kPi, 1.0, 0.9),
           item("nightstand", -1.40, 1.95, kPi, 1.0, 0.0),
           item("nightstand", 1.40, 1.95, kPi, 0.85, 0.0),
           item("wardrobe", -2.00, -0.40, kHalfPi, 0.9, 0.25),
           item("desk", 1.85, -0.60, -kHalfPi, 0.9, 0.0),
           item("chair", 1.00, -0.60, kHalfPi, 0.9, 0.85),
           item("dresser", -0.85, -2.05, 0.0, 0.6, 0.2),
           item("tv stand", 0.85, -2.10, 0.0, 0.5, 0.0),
           item("ceiling lamp", 0.00, 0.00, 0.0, 0.7, 0.0, 2.40),
           item("pendant lamp", 0.00, -1.20, 0.0, 0.5, 0.0, 2.00),
       }},
      {"kids_corner",
       {
           item("kids bed", -1.20, 1.40, kPi, 1.0, 0.9),
           item("nightstand", 0.00, 2.05, kPi, 0.9, 0.0),
           item("children cabinet", 1.30, 2.00, kPi, 0.8, 0.3),
           item("desk", 1.90, 0.20, -kHalfPi, 0.9, 0.0),
           item("chair", 1.05, 0.20, kHalfPi, 0.9, 0.85),
           item("bookshelf", -1.95, -0.80, kHalfPi, 0.7, 0.0),
           item("stool", 0.10, -1.00, 0.0, 0.5, 0.4),
           item("cabinet", 0.95, -2.05, 0.0, 0.6, 0.2),
           item("ceiling lamp", 0.20, 0.60, 0.0, 0.6, 0.0, 2.40),
       }},
  };

  lib.by_scene_type["living_room"] = {
      {"lounge",
       {
           item("loveseat sofa", 0.00, -1.70, 0.0, 1.0, 0.9),
           item("coffee table", 0.00, -0.45, 0.0, 1.0, 0.0),
           item("tv stand", 0.00, 2.15, kPi, 0.8, 0.0),
           item("armchair", -1.75, -0.30, kHalfPi, 0.7, 0.5),
           item("lounge chair", 1.75, -0.30, -kHalfPi, 0.6, 0.5),
           item("bookshelf", -1.95, 1.50, kHalfPi, 0.6, 0.0),
           item("shelf", 1.95, 1.50, -kHalfPi, 0.5, 0.0),
           item("corner side table", 1.50, -2.00, 0.0, 0.5, 0.0),
           item("pendant lamp", 0.00, -0.45, 0.0, 0.6, 0.0, 2.00),
           item("ceiling lamp", 0.00, 0.80, 0.0, 0.5, 0.0, 2.40),
       }},
      {"media_wall",
       {
           item("multi seat sofa", 0.00, 1.60, kPi, 1.0, 0.9),
           item("coffee table", 0.00, 0.30, 0.0, 1.0, 0.0),
           item("tv stand", 0.00, -2.15, 0.0, 0.9, 0.0),
           item("lazy sofa", -1.60, 0.40, kHalfPi, 0.6, 0.6),
           item("round end table", 1.45, 0.40, 0.0, 0.6, 0.0),
           item("wine cabinet", -1.95, -1.40, kHalfPi, 0.5, 0.0),
           item("console table", 1.95, -1.40, -kHalfPi, 0.5, 0.0),
           item("pendant lamp", 0.00, 0.30, 0.0, 0.6, 0.0, 2.00),
       }},
  };

  lib.by_scene_type["dining_room"] = {
      {"family_table",
       {
           item("dining table", 0.00, 0.00, 0.0, 1.0, 0.0),
           item("dining chair", 0.00, 0.98, kPi, 0.9, 0.7),
           item("dining chair", 0.00, -0.98, 0.0, 0.9, 0.7),
           item("dining chair", 1.40, 0.00, -kHalfPi, 0.7, 0.7),
           item("dining chair", -1.40, 0.00, kHalfPi, 0.7, 0.7),
           item("wine cabinet", -1.95, 1.70, kHalfPi, 0.6, 0.0),
           item("console table", 1.95, 1.70, -kHalfPi, 0.5, 0.0),
           item("pendant lamp", 0.00, 0.00, 0.0, 0.8, 0.0, 2.00),
           item("shelf", 0.00, 2.25, kPi, 0.4, 0.0),
       }},
      {"dinner_nook",
       {
           item("dining table", -0.60, 0.00, 0.0, 1.0, 0.0),
           item("dining chair", -0.60, 0.98, kPi, 1.0, 0.8),
           item("dining chair", -0.60, -0.98, 0.0, 0.8, 0.7),
           item("chinese chair", 0.80, 0.00, -kHalfPi, 0.6, 0.6),
           item("corner side table", 1.80, -1.80, 0.0, 0.6, 0.0),
           item("cabinet", 1.90, 0.90, -kHalfPi, 0.5, 0.2),
           item("pendant lamp", -0.60, 0.00, 0.0, 0.7, 0.0, 2.00),
           item("bookshelf", -2.00, -1.60, kHalfPi, 0.5, 0.0),
       }},
  };
  return lib;
}

std::string TemplateLibrary::to_json() const {
  JsonWriter w(true);
  w.begin_object();
  w.key("scene_types");
  w.begin_array();
  for (const auto& [scene_type, templates] : by_scene_type) {
    w.begin_object();
    w.key("scene_type");
    w.value(scene_type);
    w.key("templates");
    w.begin_array();
    for (const SceneTemplate& t : templates) {
      w.begin_object();
      w.key("name");
      w.value(t.name);
      w.key("items");
      w.begin_array();
      for (const TemplateItem& it : t.items) {
        w.begin_object();
        w.key("category");
        w.value(it.category);
        w.key("x");
        w.value(it.x);
        w.key("y");
        w.value(it.y);
        w.key("z");
        w.value(it.z);
        w.key("yaw");
        w.value(it.yaw, 15);
        w.key("prob");
        w.value(it.prob);
        w.key("action_prob");
        w.value(it.action_prob);
        w.end_object();
      }
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

TemplateLibrary TemplateLibrary::from_json(const std::string& text,
                                           const std::string& origin) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("scene_types") || !j["scene_types"].is_array())
    throw FileFormatError(origin, 0, "template library needs a 'scene_types' array");
  TemplateLibrary lib;
  for (const auto& entry : j["scene_types"]) {
    if (!entry.contains("scene_type") || !entry["scene_type"].is_string() ||
        !entry.contains("templates") || !entry["templates"].is_array())
      throw FileFormatError(origin, 0,
                            "each entry needs scene_type and a templates array");
    std::vector<SceneTemplate> templates;
    for (const auto& jt : entry["templates"]) {
      SceneTemplate t;
      if (!jt.contains("name") || !jt["name"].is_string() || !jt.contains("items") ||
          !jt["items"].is_array() || jt["items"].empty())
        throw FileFormatError(origin, 0,
                              "each template needs a name and non-empty items");
      t.name = jt["name"].get<std::string>();
      for (const auto& ji : jt["items"]) {
        TemplateItem it;
        if (!ji.contains("category") || !ji["category"].is_string())
          throw FileFormatError(origin, 0, "template item needs a category");
        it.category = ji["category"].get<std::string>();
        it.x = ji.value("x", 0.0);
        it.y = ji.value("y", 0.0);
        it.z = ji.value("z", -1.0);
        it.yaw = ji.value("yaw", 0.0);
        it.prob = ji.value("prob", 1.0);
        it.action_prob = ji.value("action_prob", 0.0);
        if (it.prob < 0.0 || it.prob > 1.0 || it.action_prob < 0.0 ||
            it.action_prob > 1.0)
          throw FileFormatError(origin, 0, "item probabilities must lie in [0, 1]");
        t.items.push_back(std::move(it));
      }
      templates.push_back(std::move(t));
    }
    lib.by_scene_type[entry["scene_type"].get<std::string>()] = std::move(templates);
  }
  return lib;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read template library from " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), path.string());
}

// ---------------------------------------------------------------------------
// hashing and splits

std::uint64_t generator_config_hash(const GeneratorConfig& cfg) {
  std::string canon = "v1;" + cfg.scene_type + ";";
  append_double(canon, cfg.room_half_x);
  append_double(canon, cfg.room_half_y);
  append_double(canon, cfg.position_jitter);
  append_double(canon, cfg.size_jitter);
  append_double(canon, cfg.caption_style_prob);
  canon += std::to_string(cfg.test_permille) + ";" + std::to_string(cfg.seed) + ";";
  for (const SceneTemplate& t : cfg.templates) {
    canon += t.name + "{";
    for (const TemplateItem& it : t.items) {
      canon += it.category + ":";
      append_double(canon, it.x);
      append_double(canon, it.y);
      append_double(canon, it.z);
      append_double(canon, it.yaw);
      append_double(canon, it.prob);
      append_double(canon, it.action_prob);
    }
    canon += "}";
  }
  return fnv1a64(canon);
}

std::string split_for_id(const std::string& id, int test_permille) {
  if (test_permille < 0 || test_permille > 1000)
    throw ConfigError("test permille must lie in [0, 1000]");
  return fnv1a64(id) % 1000 < static_cast<std::uint64_t>(test_permille) ? "test"
                                                                        : "train";
}

// ---------------------------------------------------------------------------
// generation

namespace {

struct GenContext {
  CategoryVocabulary vocab;
  std::vector<std::string> styles;
  prompt::PhraseLexicon lexicon;
  prompt::ActionRuleTable rules;
  assembly::FeatureCodebook book;
  int min_objects = 3;
  int max_objects = 12;
};

GenContext make_context(const std::string& scene_type) {
  GenContext ctx;
  auto registry = SceneTypeRegistry::with_builtins();
  const SceneTypeSpec& spec = registry.get(scene_type);
  ctx.vocab = spec.vocab;
  ctx.min_objects = spec.min_objects;
  ctx.max_objects = spec.max_objects;
  ctx.lexicon = prompt::PhraseLexicon::builtin();
  ctx.styles = ctx.lexicon.style_adjectives();
  ctx.rules = prompt::ActionRuleTable::builtin();
  auto catalog = assembly::make_builtin_catalog(ctx.vocab, ctx.styles);
  std::vector<std::vector<double>> features;
  features.reserve(static_cast<size_t>(catalog.size()));
  for (const assembly::Asset& a : catalog.assets()) features.push_back(a.feature);
  ctx.book = assembly::fit_codebook(features, assembly::kCodebookSize);
  return ctx;
}

Layout layout_for_item(const TemplateItem& item, const GeneratorConfig& cfg,
                       Rng& rng) {
  auto base = assembly::category_base_size(item.category);
  std::array<double, 3> s{};
  for (int d = 0; d < 3; ++d)
    s[d] = snap(base[d] * (1.0 + rng.uniform(-cfg.size_jitter, cfg.size_jitter)));

  double sc = std::cos(item.yaw);
  double sn = std::sin(item.yaw);
  // axis-aligned rotations come out exactly representable
  if (std::abs(sc) < 1e-9) sc = 0.0;
  if (std::abs(sn) < 1e-9) sn = 0.0;
  if (std::abs(std::abs(sc) - 1.0) < 1e-9) sc = sc < 0 ? -1.0 : 1.0;
  if (std::abs(std::abs(sn) - 1.0) < 1e-9) sn = sn < 0 ? -1.0 : 1.0;
  sc = snap(sc);
  sn = snap(sn);
  double norm = std::hypot(sc, sn);
  if (std::abs(norm - 1.0) > 1e-9 && norm > 0.0) {
    sc /= norm;
    sn /= norm;
  }

  // world-frame footprint half extents after rotation
  double ex = std::abs(sc) * s[0] + std::abs(sn) * s[1];
  double ey = std::abs(sn) * s[0] + std::abs(sc) * s[1];

  double x = item.x + rng.uniform(-cfg.position_jitter, cfg.position_jitter);
  double y = item.y + rng.uniform(-cfg.position_jitter, cfg.position_jitter);
  if (cfg.room_half_x > ex) x = std::clamp(x, -(cfg.room_half_x - ex), cfg.room_half_x - ex);
  if (cfg.room_half_y > ey) y = std::clamp(y, -(cfg.room_half_y - ey), cfg.room_half_y - ey);
  double z = item.z < 0.0 ? s[2] : item.z;

  Layout l;
  l.t = {snap(x), snap(y), snap(z)};
  l.s = s;
  l.rot_cos = sc;
  l.rot_sin = sn;
  return l;
}

bool collides_with_any(const Layout& candidate, const std::vector<Layout>& placed) {
  OrientedBox box = OrientedBox::from_layout(candidate);
  for (const Layout& other : placed)
    if (boxes_intersect_3d(box, OrientedBox::from_layout(other))) return true;
  return false;
}

struct CaptionResult {
  std::string text;
  std::vector<prompt::Triplet> triplets;
};

CaptionResult make_caption(const std::vector<std::string>& categories,
                           const std::vector<int>& relations,
                           const std::string& style, const GeneratorConfig& cfg,
                           const GenContext& ctx, Rng& rng) {
  const int n = static_cast<int>(categories.size());
  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j &&
          categories[static_cast<size_t>(i)] != categories[static_cast<size_t>(j)] &&
          relations[static_cast<size_t>(i * n + j)] !=
              static_cast<int>(RelationPredicate::None))
        candidates.emplace_back(i, j);

  CaptionResult out;
  bool with_style = rng.bernoulli(cfg.caption_style_prob);
  if (candidates.empty()) {
    std::vector<std::string> adjs;
    if (with_style) adjs.push_back(style);
    out.text = prompt::render_object_sentence(adjs, categories[0]);
    return out;
  }

  for (size_t k = candidates.size(); k > 1; --k)
    std::swap(candidates[k - 1], candidates[rng.index(k)]);

  int want = 1 + (rng.bernoulli(0.5) ? 1 : 0);
  std::vector<std::pair<std::string, std::string>> used_pairs;
  for (const auto& [i, j] : candidates) {
    if (static_cast<int>(out.triplets.size()) >= want) break;
    std::string a = categories[static_cast<size_t>(i)];
    std::string b = categories[static_cast<size_t>(j)];
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (std::find(used_pairs.begin(), used_pairs.end(), key) != used_pairs.end())
      continue;
    used_pairs.push_back(key);
    auto p = static_cast<RelationPredicate>(relations[static_cast<size_t>(i * n + j)]);
    out.triplets.push_back({a, p, b});
    std::vector<std::string> adjs;
    if (out.triplets.size() == 1 && with_style) adjs.push_back(style);
    std::string sentence = prompt::render_relation_sentence(adjs, a, p, b, ctx.lexicon);
    if (!out.text.empty()) out.text += " ";
    out.text += sentence;
  }
  return out;
}

SceneRecord generate_record(const GeneratorConfig& cfg, const GenContext& ctx,
                            const std::vector<SceneTemplate>& templates, int index) {
  std::uint64_t record_seed =
      Rng::mix(cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1));
  Rng rng(record_seed);

  const SceneTemplate& templ = templates[rng.index(templates.size())];
  const std::string style = ctx.styles[rng.index(ctx.styles.size())];

  // inclusion pass
  std::vector<int> chosen;
  std::vector<int> skipped;
  for (int k = 0; k < static_cast<int>(templ.items.size()); ++k) {
    if (templ.items[static_cast<size_t>(k)].prob >= 1.0 ||
        rng.bernoulli(templ.items[static_cast<size_t>(k)].prob))
      chosen.push_back(k);
    else
      skipped.push_back(k);
  }
  while (static_cast<int>(chosen.size()) < ctx.min_objects && !skipped.empty()) {
    chosen.push_back(skipped.front());
    skipped.erase(skipped.begin());
  }
  std::sort(chosen.begin(), chosen.end());

  // placement with collision rejection
  std::vector<std::string> categories;
  std::vector<HumanAction> actions;
  std::vector<Layout> layouts;
  for (int k : chosen) {
    const TemplateItem& item = templ.items[static_cast<size_t>(k)];
    Layout placed;
    bool ok = false;
    for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
      placed = layout_for_item(item, cfg, rng);
      ok = !collides_with_any(placed, layouts);
    }
    if (!ok) continue;  // crowded corner; drop the item
    categories.push_back(item.category);
    layouts.push_back(placed);
    HumanAction primary = ctx.rules.primary(cfg.scene_type, item.category);
    bool interactive = item.action_prob > 0.0 && primary != HumanAction::NoneAction &&
                       rng.bernoulli(item.action_prob);
    actions.push_back(interactive ? primary : HumanAction::NoneAction);
  }

  const int n = static_cast<int>(categories.size());
  if (n < ctx.min_objects)
    throw Error("template '" + templ.name + "' could not place " +
                std::to_string(ctx.min_objects) + " objects");

  // every scene keeps at least one object a human can use
  bool any_interactive =
      std::any_of(actions.begin(), actions.end(),
                  [](HumanAction a) { return a != HumanAction::NoneAction; });
  if (!any_interactive) {
    for (int i = 0; i < n && !any_interactive; ++i) {
      HumanAction primary = ctx.rules.primary(cfg.scene_type, categories[static_cast<size_t>(i)]);
      if (primary != HumanAction::NoneAction) {
        actions[static_cast<size_t>(i)] = primary;
        any_interactive = true;
      }
    }
    if (!any_interactive)
      throw Error("template '" + templ.name + "' has no category a human can use");
  }

  // graph tokens
  SceneRecord rec;
  rec.graph.n = n;
  rec.graph.categories.resize(static_cast<size_t>(n));
  rec.graph.features.resize(static_cast<size_t>(n));
  rec.graph.actions.resize(static_cast<size_t>(n));
  rec.graph.relations.assign(static_cast<size_t>(n) * static_cast<size_t>(n),
                             static_cast<int>(RelationPredicate::None));
  for (int i = 0; i < n; ++i) {
    auto cat_index = ctx.vocab.index_of(categories[static_cast<size_t>(i)]);
    if (!cat_index)
      throw Error("template category '" + categories[static_cast<size_t>(i)] +
                  "' is not in the " + cfg.scene_type + " vocabulary");
    rec.graph.categories[static_cast<size_t>(i)] = *cat_index;
    rec.graph.features[static_cast<size_t>(i)] = assembly::quantize_feature(
        assembly::category_style_feature(categories[static_cast<size_t>(i)], style,
                                         ctx.book.dim),
        ctx.book);
    rec.graph.actions[static_cast<size_t>(i)] =
        static_cast<int>(actions[static_cast<size_t>(i)]);
  }
  RelationRuleConfig rules_cfg;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        rec.graph.relations[static_cast<size_t>(i * n + j)] =
            static_cast<int>(dominant_relation(layouts[static_cast<size_t>(j)],
                                               layouts[static_cast<size_t>(i)],
                                               rules_cfg));

  CaptionResult caption =
      make_caption(categories, rec.graph.relations, style, cfg, ctx, rng);

  char id_buf[64];
  std::snprintf(id_buf, sizeof(id_buf), "%s_%06d", cfg.scene_type.c_str(), index);
  rec.id = id_buf;
  rec.split = split_for_id(rec.id, cfg.test_permille);
  rec.caption = caption.text;
  rec.triplets = std::move(caption.triplets);

  rec.scene.scene_type = cfg.scene_type;
  rec.scene.seed = record_seed;
  rec.scene.prompt = rec.caption;
  for (int i = 0; i < n; ++i) {
    SceneObject obj;
    obj.category = categories[static_cast<size_t>(i)];
    obj.feature_code = rec.graph.features[static_cast<size_t>(i)];
    obj.action = actions[static_cast<size_t>(i)];
    obj.layout = layouts[static_cast<size_t>(i)];
    rec.scene.objects.push_back(std::move(obj));
  }
  return rec;
}

}  // namespace

Corpus generate_corpus(const GeneratorConfig& cfg, int count) {
  if (count < 1) throw ConfigError("corpus generation needs count >= 1");
  if (!(cfg.room_half_x > 0.0) || !(cfg.room_half_y > 0.0))
    throw ConfigError("room extents must be positive");
  if (cfg.position_jitter < 0.0 || cfg.size_jitter < 0.0 || cfg.size_jitter >= 1.0)
    throw ConfigError("jitter magnitudes out of range");
  if (cfg.caption_style_prob < 0.0 || cfg.caption_style_prob > 1.0)
    throw ConfigError("caption style probability must lie in [0, 1]");
  if (cfg.test_permille < 0 || cfg.test_permille > 1000)
    throw ConfigError("test permille must lie in [0, 1000]");

  GenContext ctx = make_context(cfg.scene_type);
  std::vector<SceneTemplate> templates = cfg.templates;
  if (templates.empty()) {
    TemplateLibrary lib = TemplateLibrary::builtin();
    auto it = lib.by_scene_type.find(cfg.scene_type);
    if (it == lib.by_scene_type.end())
      throw ConfigError("no built-in templates for scene type " + cfg.scene_type +
                        "; provide templates explicitly");
    templates = it->second;
  }
  for (const SceneTemplate& t : templates) {
    if (t.items.empty()) throw ConfigError("template '" + t.name + "' has no items");
    if (static_cast<int>(t.items.size()) > ctx.max_objects)
      throw ConfigError("template '" + t.name + "' exceeds the scene type's " +
                        std::to_string(ctx.max_objects) + "-object limit");
  }

  GeneratorConfig hashed = cfg;
  hashed.templates = templates;

  Corpus corpus;
  corpus.scene_type = cfg.scene_type;
  corpus.config_hash = generator_config_hash(hashed);
  corpus.records.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    corpus.records.push_back(generate_record(cfg, ctx, templates, i));
  return corpus;
}

// ---------------------------------------------------------------------------
// serialization

std::string record_to_json(const SceneRecord& record) {
  JsonWriter w(false);
  w.begin_object();
  w.key("id");
  w.value(record.id);
  w.key("split");
  w.value(record.split);
  w.key("caption");
  w.value(record.caption);
  w.key("triplets");
  w.begin_array();
  for (const prompt::Triplet& t : record.triplets) {
    w.begin_object();
    w.key("subject");
    w.value(t.subject);
    w.key("predicate");
    w.value(to_string(t.predicate));
    w.key("object");
    w.value(t.object);
    w.end_object();
  }
  w.end_array();
  w.key("graph");
  w.begin_object();
  w.key("n");
  w.value_int(record.graph.n);
  auto int_array = [&w](const char* name, const std::vector<int>& values) {
    w.key(name);
    w.begin_array();
    for (int v : values) w.value_int(v);
    w.end_array();
  };
  int_array("categories", record.graph.categories);
  int_array("features", record.graph.features);
  int_array("actions", record.graph.actions);
  int_array("relations", record.graph.relations);
  w.end_object();
  w.key("scene");
  w.raw(write_scene_json(record.scene, false));
  w.end_object();
  return w.str();
}

SceneRecord record_from_json(const std::string& text, const std::string& origin,
                             int line_number) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw FileFormatError(origin, line_number, "record line is not a JSON object");
  auto fail = [&](const std::string& what) -> FileFormatError {
    return FileFormatError(origin, line_number, what);
  };

  SceneRecord rec;
  try {
    rec.id = j.at("id").get<std::string>();
    rec.split = j.at("split").get<std::string>();
    rec.caption = j.at("caption").get<std::string>();
    for (const auto& jt : j.at("triplets")) {
      prompt::Triplet t;
      t.subject = jt.at("subject").get<std::string>();
      t.object = jt.at("object").get<std::string>();
      auto p = relation_from_string(jt.at("predicate").get<std::string>());
      if (!p) throw fail("unknown predicate in triplet");
      t.predicate = *p;
      rec.triplets.push_back(std::move(t));
    }
    const auto& jg = j.at("graph");
    rec.graph.n = jg.at("n").get<int>();
    rec.graph.categories = jg.at("categories").get<std::vector<int>>();
    rec.graph.features = jg.at("features").get<std::vector<int>>();
    rec.graph.actions = jg.at("actions").get<std::vector<int>>();
    rec.graph.relations = jg.at("relations").get<std::vector<int>>();
    rec.scene = read_scene_json(j.at("scene").dump(), origin);
  } catch (const FileFormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }

  if (rec.split != "train" && rec.split != "test")
    throw fail("split must be 'train' or 'test'");
  const size_t n = static_cast<size_t>(rec.graph.n);
  if (rec.graph.n < 0 || rec.graph.categories.size() != n ||
      rec.graph.features.size() != n || rec.graph.actions.size() != n ||
      rec.graph.relations.size() != n * n)
    throw fail("graph token arrays do not match the node count");
  if (rec.scene.objects.size() != n)
    throw fail("scene object count does not match the graph");
  return rec;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus to " + path.string());
  JsonWriter header(false);
  header.begin_object();
  header.key("format");
  header.value("roomforge-corpus");
  header.key("version");
  header.value_int(corpus.version);
  header.key("scene_type");
  header.value(corpus.scene_type);
  header.key("config_hash");
  header.value(hex64(corpus.config_hash));
  header.key("records");
  header.value_uint(corpus.records.size());
  header.end_object();
  out << header.str() << "\n";
  for (const SceneRecord& rec : corpus.records) out << record_to_json(rec) << "\n";
  if (!out) throw Error("short write while saving corpus to " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read corpus from " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw FileFormatError(path.string(), 1, "missing corpus header line");
  auto header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() ||
      header.value("format", "") != "roomforge-corpus")
    throw FileFormatError(path.string(), 1, "not a corpus file (bad header)");
  Corpus corpus;
  corpus.version = header.value("version", 0);
  if (corpus.version != 1)
    throw FileFormatError(path.string(), 1,
                          "unsupported corpus version " +
                              std::to_string(corpus.version));
  corpus.scene_type = header.value("scene_type", "");
  corpus.config_hash =
      std::stoull(header.value("config_hash", "0"), nullptr, 16);
  std::uint64_t declared = header.value("records", std::uint64_t{0});

  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    corpus.records.push_back(record_from_json(line, path.string(), line_number));
  }
  if (corpus.records.size() != declared)
    throw FileFormatError(path.string(), line_number,
                          "header declares " + std::to_string(declared) +
                              " records but the file holds " +
                              std::to_string(corpus.records.size()));
  return corpus;
}

std::vector<const SceneRecord*> split_records(const Corpus& corpus,
                                              const std::string& split) {
  std::vector<const SceneRecord*> out;
  for (const SceneRecord& rec : corpus.records)
    if (rec.split == split) out.push_back(&rec);
  return out;
}

// ---------------------------------------------------------------------------
// external data ingestion

Corpus ingest_3dfront(const std::filesystem::path& directory,
                      const std::string& scene_type,
                      std::vector<std::string>* warnings) {
  GenContext ctx = make_context(scene_type);  // validates the scene type
  if (!std::filesystem::is_directory(directory))
    throw MissingDatasetError("room dataset directory not found: " +
                              directory.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  // "bedroom" matches "MasterBedroom", "living_room" matches "LivingDiningRoom"
  std::string type_word = scene_type.substr(0, scene_type.find('_'));
  if (type_word == "bedroom") type_word = "bed";

  Corpus corpus;
  corpus.scene_type = scene_type;
  corpus.config_hash = fnv1a64("3dfront:" + scene_type);

  for (const auto& file : files) {
    std::ifstream in(file);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      warn("skipping unparseable room file " + file.filename().string());
      continue;
    }
    std::string room_type = assembly::normalize_category_name(
        j.value("room_type", std::string{}));
    if (room_type.find(type_word) == std::string::npos) continue;
    std::string uid = j.value("uid", file.stem().string());

    std::vector<std::string> categories;
    std::vector<Layout> layouts;
    std::vector<HumanAction> actions;
    if (!j.contains("furniture") || !j["furniture"].is_array()) {
      warn("room " + uid + " has no furniture array; skipped");
      continue;
    }
    for (const auto& row : j["furniture"]) {
      if (!row.is_object() || !row.contains("category") ||
          !row["category"].is_string()) {
        warn("room " + uid + ": furniture row without a category; skipped");
        continue;
      }
      std::string raw = row["category"].get<std::string>();
      std::string mapped = assembly::map_external_category(raw, ctx.vocab);
      if (mapped.empty()) {
        warn("room " + uid + ": no vocabulary match for '" + raw + "'; skipped");
        continue;
      }
      Layout l;
      try {
        auto pos = row.at("position").get<std::vector<double>>();
        auto size = row.at("size").get<std::vector<double>>();
        double yaw = row.value("yaw", 0.0);
        if (pos.size() != 3 || size.size() != 3) throw Error("bad geometry arity");
        l = make_layout(pos[0], pos[1], pos[2], size[0], size[1], size[2], yaw);
        for (double& v : l.t) v = snap(v);
        for (double& v : l.s) v = snap(v);
        if (!l.valid()) throw Error("degenerate layout");
      } catch (const std::exception&) {
        warn("room " + uid + ": bad geometry for '" + raw + "'; skipped");
        continue;
      }
      categories.push_back(mapped);
      layouts.push_back(l);
      actions.push_back(ctx.rules.primary(scene_type, mapped));
    }
    if (categories.empty()) {
      warn("room " + uid + " has no mappable furniture; skipped");
      continue;
    }

    const int n = static_cast<int>(categories.size());
    SceneRecord rec;
    rec.id = uid;
    std::string declared_split = j.value("split", std::string{});
    rec.split = (declared_split == "train" || declared_split == "test")
                    ? declared_split
                    : split_for_id(uid, 100);
    rec.graph.n = n;
    rec.graph.relations.assign(static_cast<size_t>(n) * static_cast<size_t>(n),
                               static_cast<int>(RelationPredicate::None));
    RelationRuleConfig rules_cfg;
    for (int i = 0; i < n; ++i) {
      rec.graph.categories.push_back(*ctx.vocab.index_of(categories[static_cast<size_t>(i)]));
      rec.graph.features.push_back(assembly::quantize_feature(
          assembly::category_style_feature(categories[static_cast<size_t>(i)],
                                           "modern", ctx.book.dim),
          ctx.book));
      rec.graph.actions.push_back(static_cast<int>(actions[static_cast<size_t>(i)]));
      for (int jj = 0; jj < n; ++jj)
        if (i != jj)
          rec.graph.relations[static_cast<size_t>(i * n + jj)] =
              static_cast<int>(dominant_relation(layouts[static_cast<size_t>(jj)],
                                                 layouts[static_cast<size_t>(i)],
                                                 rules_cfg));
    }

    GeneratorConfig caption_cfg;
    caption_cfg.scene_type = scene_type;
    Rng rng(fnv1a64(uid));
    CaptionResult caption = make_caption(
        categories, rec.graph.relations,
        ctx.styles[rng.index(ctx.styles.size())], caption_cfg, ctx, rng);
    rec.caption = caption.text;
    rec.triplets = std::move(caption.triplets);

    rec.scene.scene_type = scene_type;
    rec.scene.seed = fnv1a64(uid);
    rec.scene.prompt = rec.caption;
    for (int i = 0; i < n; ++i) {
      SceneObject obj;
      obj.category = categories[static_cast<size_t>(i)];
      obj.feature_code = rec.graph.features[static_cast<size_t>(i)];
      obj.action = actions[static_cast<size_t>(i)];
      obj.layout = layouts[static_cast<size_t>(i)];
      rec.scene.objects.push_back(std::move(obj));
    }
    corpus.records.push_back(std::move(rec));
  }
  if (files.empty()) warn("no room files found in " + directory.string());
  return corpus;
}

}  // namespace roomforge::corpus
