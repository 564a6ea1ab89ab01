#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "roomforge/assembly/assemble.hpp"
#include "roomforge/assembly/catalog.hpp"
#include "roomforge/assembly/codebook.hpp"
#include "roomforge/assembly/humans.hpp"
#include "roomforge/assembly/retrieval.hpp"
#include "roomforge/errors.hpp"
#include "roomforge/geometry.hpp"
#include "roomforge/rng.hpp"
#include "roomforge/scene_io.hpp"
#include "roomforge/types.hpp"

using namespace roomforge;
using namespace roomforge::assembly;

namespace {

std::vector<std::vector<double>> blob_data(Rng& rng, int clusters, int per_cluster,
                                           int dim, double spread) {
  std::vector<std::vector<double>> out;
  for (int c = 0; c < clusters; ++c) {
    std::vector<double> center(static_cast<size_t>(dim), 0.0);
    center[static_cast<size_t>(c % dim)] = 3.0 * (1 + c / dim);
    for (int i = 0; i < per_cluster; ++i) {
      std::vector<double> v = center;
      for (double& x : v) x += spread * rng.normal();
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "roomforge_assembly_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

// ---------------------------------------------------------------------------
// codebook

TEST_CASE("single-entry codebook is the mean of its inputs") {
  std::vector<std::vector<double>> data = {{1.0, 2.0}, {3.0, 6.0}, {5.0, 1.0}};
  auto book = fit_codebook(data, 1);
  REQUIRE(book.size() == 1);
  CHECK(book.entries[0][0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(book.entries[0][1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("distinct one-hot inputs come back as a permutation") {
  const int k = 6;
  std::vector<std::vector<double>> data;
  for (int i = 0; i < k; ++i) {
    std::vector<double> v(k, 0.0);
    v[static_cast<size_t>(i)] = 1.0;
    data.push_back(std::move(v));
  }
  auto book = fit_codebook(data, k);
  REQUIRE(book.size() == k);
  // every input is one centroid, every centroid is one input
  std::vector<bool> used(static_cast<size_t>(k), false);
  for (const auto& entry : book.entries) {
    bool matched = false;
    for (int i = 0; i < k; ++i) {
      double d = 0.0;
      for (int c = 0; c < k; ++c) {
        double e = entry[static_cast<size_t>(c)] - data[static_cast<size_t>(i)][static_cast<size_t>(c)];
        d += e * e;
      }
      if (d < 1e-20 && !used[static_cast<size_t>(i)]) {
        used[static_cast<size_t>(i)] = true;
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("fixed-seed fit stays within 5% of a ten-restart oracle") {
  Rng rng(404);
  auto data = blob_data(rng, 6, 20, 8, 0.05);
  auto ours = fit_codebook(data, 6);
  double our_err = quantization_error(data, ours);

  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    best = std::min(best, quantization_error(data, fit_codebook(data, 6, seed)));
  CHECK(our_err <= 1.05 * best + 1e-9);
}

TEST_CASE("every code is used by the data it was fit on") {
  Rng rng(11);
  auto data = blob_data(rng, 8, 25, 8, 0.08);
  auto book = fit_codebook(data, 8);
  std::vector<bool> hit(8, false);
  for (const auto& v : data) hit[static_cast<size_t>(quantize_feature(v, book))] = true;
  for (bool h : hit) CHECK(h);
}

TEST_CASE("quantization picks the nearest entry with ties to the lowest index") {
  FeatureCodebook book;
  book.dim = 2;
  book.entries = {{0.0, 0.0}, {1.0, 0.0}, {5.0, 5.0}, {2.0, 2.0}, {3.0, 0.0}};

  CHECK(quantize_feature({2.0, 2.0}, book) == 3);  // exact hit on entry 3

  // (2, 0) is equidistant from entries 1 and 4; the lower index wins
  CHECK(quantize_feature({2.0, 0.0}, book) == 1);

  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v = {rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)};
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < book.size(); ++k) {
      double d = 0.0;
      for (int c = 0; c < 2; ++c) {
        double e = v[static_cast<size_t>(c)] - book.entries[static_cast<size_t>(k)][static_cast<size_t>(c)];
        d += e * e;
      }
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    CHECK(quantize_feature(v, book) == best);
  }

  CHECK_THROWS_AS(quantize_feature({1.0}, book), Error);
  CHECK_THROWS_AS(quantize_feature({1.0, std::nan("")}, book), Error);
}

TEST_CASE("codebook fit validates its inputs") {
  std::vector<std::vector<double>> tiny = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(fit_codebook(tiny, 3), InsufficientDataError);
  CHECK_THROWS_AS(fit_codebook({}, 1), InsufficientDataError);
  std::vector<std::vector<double>> ragged = {{1.0, 0.0}, {0.0}};
  CHECK_THROWS_AS(fit_codebook(ragged, 1), Error);
}

TEST_CASE("codebook JSON round trips through disk") {
  Rng rng(3);
  auto data = blob_data(rng, 4, 10, 5, 0.1);
  auto book = fit_codebook(data, 4);

  auto path = temp_dir() / "codebook.json";
  save_codebook(book, path);
  auto loaded = load_codebook(path);
  CHECK(loaded.dim == book.dim);
  REQUIRE(loaded.entries.size() == book.entries.size());
  for (size_t k = 0; k < book.entries.size(); ++k)
    for (size_t c = 0; c < book.entries[k].size(); ++c)
      CHECK(loaded.entries[k][c] == book.entries[k][c]);  // exact via JSON doubles

  CHECK_THROWS_AS(FeatureCodebook::from_json("nonsense"), FileFormatError);
  CHECK_THROWS_AS(FeatureCodebook::from_json(R"({"dim": 3, "entries": [[1, 2]]})"),
                  FileFormatError);
  std::filesystem::remove(path);
}

TEST_CASE("named feature directions are deterministic unit vectors") {
  auto a = feature_direction("category:desk", 32);
  auto b = feature_direction("category:desk", 32);
  auto c = feature_direction("category:chair", 32);
  CHECK(a == b);
  double norm = 0.0, dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    norm += a[i] * a[i];
    dot += a[i] * c[i];
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dot) < 0.8);  // distinct names give distinct directions

  auto styled = category_style_feature("desk", "modern", 32);
  double styled_norm = 0.0;
  for (double x : styled) styled_norm += x * x;
  CHECK(styled_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(category_style_feature("desk", "modern", 32) == styled);
}

// ---------------------------------------------------------------------------
// catalog

TEST_CASE("builtin catalog covers every category twice per style") {
  auto registry = SceneTypeRegistry::with_builtins();
  const auto& vocab = registry.get("bedroom").vocab;
  std::vector<std::string> styles = {"modern", "wooden", "vintage", "industrial"};

  auto catalog = make_builtin_catalog(vocab, styles);
  CHECK(catalog.size() == vocab.size() * static_cast<int>(styles.size()) * 2);
  for (const std::string& cat : vocab.names()) {
    CHECK(catalog.has_category(cat));
    CHECK(catalog.in_category(cat).size() == styles.size() * 2);
  }

  // deterministic: a second build is byte-identical
  auto again = make_builtin_catalog(vocab, styles);
  CHECK(catalog_to_json(again) == catalog_to_json(catalog));

  // all features unit, all sizes positive (constructor enforces, spot-check)
  for (const Asset& a : catalog.assets()) {
    double norm = 0.0;
    for (double x : a.feature) norm += x * x;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
    for (double s : a.size) CHECK(s > 0.0);
  }
}

TEST_CASE("catalog JSON round trips byte for byte") {
  auto registry = SceneTypeRegistry::with_builtins();
  const auto& vocab = registry.get("bedroom").vocab;
  auto catalog = make_builtin_catalog(vocab, {"modern", "classic"});

  std::string text = catalog_to_json(catalog);
  auto parsed = catalog_from_json(text);
  CHECK(catalog_to_json(parsed) == text);

  auto path = temp_dir() / "catalog.json";
  save_catalog(catalog, path);
  auto loaded = load_catalog(path);
  CHECK(catalog_to_json(loaded) == text);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(catalog_from_json("{}"), FileFormatError);
  CHECK_THROWS_AS(catalog_from_json(R"([{"id": "x"}])"), FileFormatError);
}

TEST_CASE("catalog construction rejects malformed assets") {
  Asset good;
  good.id = "a";
  good.category = "desk";
  good.feature = {1.0, 0.0};
  good.size = {0.5, 0.5, 0.5};

  Asset bad_norm = good;
  bad_norm.id = "b";
  bad_norm.feature = {2.0, 0.0};
  CHECK_THROWS_AS(AssetCatalog({good, bad_norm}), Error);

  Asset bad_size = good;
  bad_size.id = "c";
  bad_size.size = {0.5, -0.1, 0.5};
  CHECK_THROWS_AS(AssetCatalog({good, bad_size}), Error);

  Asset dup = good;
  CHECK_THROWS_AS(AssetCatalog({good, dup}), Error);

  AssetCatalog ok({good});
  CHECK(ok.size() == 1);
  CHECK(ok.categories() == std::vector<std::string>{"desk"});
  CHECK_FALSE(ok.has_category("chair"));
}

TEST_CASE("external model index ingestion maps categories and warns on misses") {
  auto registry = SceneTypeRegistry::with_builtins();
  const auto& vocab = registry.get("bedroom").vocab;

  auto path = temp_dir() / "model_info.json";
  {
    std::ofstream out(path);
    out << R"([
      {"model_id": "m1", "category": "King-size Bed", "style": "Modern"},
      {"model_id": "m2", "category": "Nightstand", "style": ""},
      {"model_id": "m3", "category": "Espresso Machine", "style": "Industrial"},
      {"model_id": "m4", "category": "Lounge Chair / Cafe Chair / Office Chair"}
    ])";
  }

  std::vector<std::string> warnings;
  auto catalog = ingest_model_info(path, vocab, 32, &warnings);
  CHECK(catalog.size() == 3);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("Espresso Machine") != std::string::npos);

  CHECK(catalog.assets()[0].id == "m1");
  CHECK(catalog.assets()[0].category == "double bed");
  CHECK(catalog.assets()[1].category == "nightstand");
  // the bedroom vocabulary has no lounge chair; nearest contained name wins
  CHECK(catalog.assets()[2].category == "chair");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(ingest_model_info(temp_dir() / "missing.json", vocab),
                  MissingDatasetError);

  auto bad = temp_dir() / "bad_model_info.json";
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  CHECK_THROWS_AS(ingest_model_info(bad, vocab), FileFormatError);
  std::filesystem::remove(bad);
}

// ---------------------------------------------------------------------------
// retrieval

namespace {

// straight-line reimplementation of the retrieval contract used as an oracle
std::string oracle_retrieve(const AssetCatalog& catalog, const FeatureCodebook& book,
                            const std::string& category, int code,
                            const std::array<double, 3>& size, int top_k) {
  struct Row {
    std::string id;
    double cos;
    double dist;
  };
  std::vector<Row> rows;
  for (const Asset& a : catalog.assets()) {
    if (a.category != category) continue;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.feature.size(); ++i) {
      dot += a.feature[i] * book.entries[static_cast<size_t>(code)][i];
      na += a.feature[i] * a.feature[i];
      nb += book.entries[static_cast<size_t>(code)][i] *
            book.entries[static_cast<size_t>(code)][i];
    }
    double d = 0.0;
    for (int c = 0; c < 3; ++c) {
      double e = a.size[static_cast<size_t>(c)] - size[static_cast<size_t>(c)];
      d += e * e;
    }
    rows.push_back({a.id, dot / std::sqrt(na * nb), std::sqrt(d)});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.cos != y.cos) return x.cos > y.cos;
    return x.id < y.id;
  });
  if (static_cast<int>(rows.size()) > top_k) rows.resize(static_cast<size_t>(top_k));
  const Row* best = &rows[0];
  for (const Row& r : rows)
    if (r.dist < best->dist || (r.dist == best->dist && r.id < best->id)) best = &r;
  return best->id;
}

}  // namespace

TEST_CASE("retrieval ranks by cosine then size and matches the oracle") {
  auto registry = SceneTypeRegistry::with_builtins();
  const auto& vocab = registry.get("bedroom").vocab;
  std::vector<std::string> styles = {"modern", "wooden", "vintage", "industrial",
                                     "minimalist", "classic", "metal", "fabric"};
  auto catalog = make_builtin_catalog(vocab, styles);

  std::vector<std::vector<double>> features;
  for (const Asset& a : catalog.assets()) features.push_back(a.feature);
  auto book = fit_codebook(features, 16);

  Rng rng(2025);
  for (int trial = 0; trial < 60; ++trial) {
    const std::string& category =
        vocab.name(static_cast<int>(rng.index(static_cast<size_t>(vocab.size()))));
    int code = static_cast<int>(rng.index(static_cast<size_t>(book.size())));
    std::array<double, 3> size = {rng.uniform(0.1, 1.2), rng.uniform(0.1, 1.2),
                                  rng.uniform(0.1, 1.2)};
    const Asset& got = retrieve_object(catalog, book, category, code, size);
    CHECK(got.id == oracle_retrieve(catalog, book, category, code, size, 5));
    CHECK(got.category == category);
  }
}

TEST_CASE("retrieval result does not depend on catalog order") {
  auto registry = SceneTypeRegistry::with_builtins();
  const auto& vocab = registry.get("bedroom").vocab;
  auto catalog = make_builtin_catalog(vocab, {"modern", "wooden", "classic"});

  std::vector<std::vector<double>> features;
  for (const Asset& a : catalog.assets()) features.push_back(a.feature);
  auto book = fit_codebook(features, 8);

  std::vector<Asset> shuffled = catalog.assets();
  Rng rng(5);
  for (size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
  AssetCatalog reordered(std::move(shuffled));

  for (int code = 0; code < book.size(); ++code) {
    const Asset& a = retrieve_object(catalog, book, "desk", code, {0.5, 0.3, 0.4});
    const Asset& b = retrieve_object(reordered, book, "desk", code, {0.5, 0.3, 0.4});
    CHECK(a.id == b.id);
  }
}

TEST_CASE("retrieval stages follow the contract on crafted catalogs") {
  FeatureCodebook book;
  book.dim = 2;
  book.entries = {{1.0, 0.0}};

  auto unit = [](double x, double y) {
    double n = std::sqrt(x * x + y * y);
    return std::vector<double>{x / n, y / n};
  };

  SUBCASE("a lone asset in the category wins regardless of feature and size") {
    std::vector<Asset> assets;
    assets.push_back({"only", "desk", unit(0.0, 1.0), {9.0, 9.0, 9.0}, ""});
    assets.push_back({"other", "chair", unit(1.0, 0.0), {0.1, 0.1, 0.1}, ""});
    AssetCatalog catalog(std::move(assets));
    CHECK(retrieve_object(catalog, book, "desk", 0, {0.2, 0.2, 0.2}).id == "only");
  }

  SUBCASE("equal cosine lets the size stage decide") {
    std::vector<Asset> assets;
    assets.push_back({"small", "desk", unit(1.0, 0.0), {1.0, 1.0, 1.0}, ""});
    assets.push_back({"large", "desk", unit(1.0, 0.0), {2.0, 2.0, 2.0}, ""});
    AssetCatalog catalog(std::move(assets));
    CHECK(retrieve_object(catalog, book, "desk", 0, {1.1, 1.0, 1.0}).id == "small");
    CHECK(retrieve_object(catalog, book, "desk", 0, {1.9, 2.0, 2.0}).id == "large");
  }

  SUBCASE("the size stage only sees the top-k by cosine") {
    std::vector<Asset> assets;
    // five decoys match the query feature exactly but have hopeless sizes;
    // the perfect-size asset sits just outside the top five by cosine
    for (int i = 0; i < 5; ++i)
      assets.push_back({"decoy" + std::to_string(i), "desk", unit(1.0, 0.0),
                        {5.0, 5.0, 5.0}, ""});
    assets.push_back({"perfect_size", "desk", unit(0.0, 1.0), {0.3, 0.3, 0.3}, ""});
    AssetCatalog catalog(std::move(assets));
    CHECK(retrieve_object(catalog, book, "desk", 0, {0.3, 0.3, 0.3}).id == "decoy0");
    // widening the shortlist lets the size stage find it
    CHECK(retrieve_object(catalog, book, "desk", 0, {0.3, 0.3, 0.3}, 6).id ==
          "perfect_size");
  }

  SUBCASE("perfect ties across both stages fall to the ascending id") {
    std::vector<Asset> assets;
    assets.push_back({"b", "desk", unit(1.0, 0.0), {1.0, 1.0, 1.0}, ""});
    assets.push_back({"a", "desk", unit(1.0, 0.0), {1.0, 1.0, 1.0}, ""});
    AssetCatalog catalog(std::move(assets));
    CHECK(retrieve_object(catalog, book, "desk", 0, {1.0, 1.0, 1.0}).id == "a");
  }

  SUBCASE("unknown categories fall back by edit distance with a warning") {
    std::vector<Asset> assets;
    assets.push_back({"d0", "desk", unit(1.0, 0.0), {0.5, 0.5, 0.5}, ""});
    assets.push_back({"c0", "chair", unit(1.0, 0.0), {0.2, 0.2, 0.2}, ""});
    AssetCatalog catalog(std::move(assets));
    std::vector<std::string> warnings;
    const Asset& got =
        retrieve_object(catalog, book, "desks", 0, {0.5, 0.5, 0.5}, 5, &warnings);
    CHECK(got.id == "d0");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("desks") != std::string::npos);
    CHECK(warnings[0].find("'desk'") != std::string::npos);
  }

  SUBCASE("bad inputs are rejected") {
    std::vector<Asset> assets;
    assets.push_back({"d0", "desk", unit(1.0, 0.0), {0.5, 0.5, 0.5}, ""});
    AssetCatalog catalog(std::move(assets));
    CHECK_THROWS_AS(retrieve_object(AssetCatalog{}, book, "desk", 0, {1, 1, 1}), Error);
    CHECK_THROWS_AS(retrieve_object(catalog, book, "desk", 7, {1, 1, 1}), Error);
    CHECK_THROWS_AS(retrieve_object(catalog, book, "desk", 0, {1, 1, 1}, 0), Error);
  }
}

TEST_CASE("edit distance counts single-character operations") {
  CHECK(edit_distance("", "") == 0);
  CHECK(edit_distance("desk", "desk") == 0);
  CHECK(edit_distance("desk", "desks") == 1);
  CHECK(edit_distance("chair", "chars") == 2);
  CHECK(edit_distance("kitten", "sitting") == 3);
}

// ---------------------------------------------------------------------------
// human poses

TEST_CASE("builtin pose library holds exactly the five bodies") {
  auto lib = PoseLibrary::builtin();
  REQUIRE(lib.poses().size() == 5);
  for (const char* id : {"SitHandsAtSides", "SitArmsOnTable", "LieHandsBehindHead",
                         "HalfLie", "StandTouch"})
    CHECK_NOTHROW(lib.get(id));
  CHECK_THROWS_AS(lib.get("Backflip"), Error);
}

TEST_CASE("pose dispatch follows action and category") {
  auto lib = PoseLibrary::builtin();
  Layout at_origin = make_layout(0, 0, 0.4, 0.4, 0.4, 0.4, 0.0);

  CHECK_FALSE(place_human("pendant lamp", HumanAction::NoneAction, at_origin, lib, 0));

  auto desk_chair = place_human("chair", HumanAction::Sitting, at_origin, lib, 1);
  REQUIRE(desk_chair);
  CHECK(desk_chair->pose_id == "SitArmsOnTable");
  CHECK(desk_chair->contact_object_index == 1);

  auto armchair = place_human("armchair", HumanAction::Sitting, at_origin, lib, 2);
  REQUIRE(armchair);
  CHECK(armchair->pose_id == "SitHandsAtSides");

  auto sofa = place_human("sofa", HumanAction::Lying, at_origin, lib, 3);
  REQUIRE(sofa);
  CHECK(sofa->pose_id == "HalfLie");

  auto bed = place_human("double bed", HumanAction::Lying, at_origin, lib, 4);
  REQUIRE(bed);
  CHECK(bed->pose_id == "LieHandsBehindHead");

  auto wardrobe = place_human("wardrobe", HumanAction::Touching, at_origin, lib, 5);
  REQUIRE(wardrobe);
  CHECK(wardrobe->pose_id == "StandTouch");
}

TEST_CASE("sitting and lying bodies share the object's placement") {
  auto lib = PoseLibrary::builtin();
  Layout bed = make_layout(1.5, -2.0, 0.25, 0.8, 1.05, 0.25, 0.6);
  auto h = place_human("double bed", HumanAction::Lying, bed, lib, 0);
  REQUIRE(h);
  CHECK(h->layout.t[0] == doctest::Approx(1.5));
  CHECK(h->layout.t[1] == doctest::Approx(-2.0));
  CHECK(h->layout.t[2] == doctest::Approx(0.25));
  CHECK(h->layout.rot_cos == doctest::Approx(std::cos(0.6)));
  CHECK(h->layout.rot_sin == doctest::Approx(std::sin(0.6)));
  CHECK(h->layout.s[1] == doctest::Approx(0.95));  // pose extents, not the bed's
}

TEST_CASE("touching bodies stand in front of the facing side, turned around") {
  auto lib = PoseLibrary::builtin();
  const auto& pose = lib.get("StandTouch");
  const double depth = 0.3 + pose.half_extents[1];

  SUBCASE("object facing +y") {
    Layout wardrobe = make_layout(1.0, 2.0, 0.9, 0.6, 0.3, 0.9, 0.0);
    auto h = place_human("wardrobe", HumanAction::Touching, wardrobe, lib, 0);
    REQUIRE(h);
    CHECK(h->layout.t[0] == doctest::Approx(1.0));
    CHECK(h->layout.t[1] == doctest::Approx(2.0 + depth));
    CHECK(h->layout.t[2] == doctest::Approx(pose.half_extents[2]));  // grounded
    CHECK(h->layout.yaw() == doctest::Approx(std::numbers::pi));
  }
  SUBCASE("object rotated a quarter turn") {
    Layout wardrobe = make_layout(1.0, 2.0, 0.9, 0.6, 0.3, 0.9, std::numbers::pi / 2);
    auto h = place_human("wardrobe", HumanAction::Touching, wardrobe, lib, 0);
    REQUIRE(h);
    CHECK(h->layout.t[0] == doctest::Approx(1.0 - depth));
    CHECK(h->layout.t[1] == doctest::Approx(2.0));
    CHECK(h->layout.yaw() == doctest::Approx(-std::numbers::pi / 2));
  }
}

TEST_CASE("seated and lying bodies intersect their contact object") {
  auto lib = PoseLibrary::builtin();
  struct Case {
    const char* category;
    HumanAction action;
  };
  for (const Case& c : {Case{"armchair", HumanAction::Sitting},
                        Case{"chair", HumanAction::Sitting},
                        Case{"double bed", HumanAction::Lying},
                        Case{"sofa", HumanAction::Lying}}) {
    auto base = category_base_size(c.category);
    Layout obj = make_layout(0.7, -1.1, base[2], base[0], base[1], base[2], 0.7);
    auto h = place_human(c.category, c.action, obj, lib, 0);
    REQUIRE(h);
    CHECK(boxes_intersect_3d(OrientedBox::from_layout(obj),
                             OrientedBox::from_layout(h->layout)));
  }
}

TEST_CASE("pose library JSON round trips and validates") {
  auto lib = PoseLibrary::builtin();
  auto path = temp_dir() / "poses.json";
  {
    std::ofstream out(path);
    out << lib.to_json();
  }
  auto loaded = PoseLibrary::from_json_file(path);
  CHECK(loaded.to_json() == lib.to_json());
  CHECK(loaded.seats_at_surface("dining chair"));
  CHECK_FALSE(loaded.seats_at_surface("armchair"));
  CHECK(loaded.reclines_on("sofa"));
  CHECK_FALSE(loaded.reclines_on("double bed"));
  std::filesystem::remove(path);

  auto bad = temp_dir() / "bad_poses.json";
  {
    std::ofstream out(bad);
    out << R"({"poses": [{"pose_id": "StandTouch", "action": "touching",
                "half_extents": [0.3, 0.2, 0.9]}]})";
  }
  CHECK_THROWS_AS(PoseLibrary::from_json_file(bad), FileFormatError);
  std::filesystem::remove(bad);
}

// ---------------------------------------------------------------------------
// scene assembly

namespace {

nn::GraphTokens make_graph(const std::vector<int>& cats, const std::vector<int>& codes,
                           const std::vector<HumanAction>& actions) {
  nn::GraphTokens g;
  g.n = static_cast<int>(cats.size());
  g.categories = cats;
  g.features = codes;
  for (HumanAction a : actions) g.actions.push_back(static_cast<int>(a));
  g.relations.assign(static_cast<size_t>(g.n) * g.n,
                     static_cast<int>(RelationPredicate::None));
  return g;
}

}  // namespace

TEST_CASE("assembly retrieves assets and places one body per interactive object") {
  auto registry = SceneTypeRegistry::with_builtins();
  const auto& vocab = registry.get("bedroom").vocab;
  auto catalog = make_builtin_catalog(vocab, {"modern", "wooden"});
  std::vector<std::vector<double>> features;
  for (const Asset& a : catalog.assets()) features.push_back(a.feature);
  auto book = fit_codebook(features, 8);
  auto poses = PoseLibrary::builtin();

  int bed = *vocab.index_of("double bed");
  int desk = *vocab.index_of("desk");
  int chair = *vocab.index_of("chair");

  auto graph = make_graph({bed, desk, chair}, {0, 1, 2},
                          {HumanAction::Lying, HumanAction::NoneAction,
                           HumanAction::Sitting});
  std::vector<Layout> layouts = {
      make_layout(0.0, 0.0, 0.25, 0.8, 1.05, 0.25, 0.0),
      make_layout(2.0, 1.0, 0.38, 0.6, 0.3, 0.38, 1.5707963),
      make_layout(2.0, 0.2, 0.45, 0.23, 0.25, 0.45, -1.5707963),
  };

  auto scene = assemble_scene(graph, layouts, vocab, catalog, book, poses);
  CHECK(scene.scene_type == "bedroom");
  REQUIRE(scene.objects.size() == 3);
  REQUIRE(scene.humans.size() == 2);
  for (const auto& obj : scene.objects) {
    CHECK_FALSE(obj.asset_id.empty());
    CHECK(catalog.has_category(obj.category));
  }
  CHECK(scene.objects[0].category == "double bed");
  CHECK(scene.humans[0].contact_object_index == 0);
  CHECK(scene.humans[0].pose_id == "LieHandsBehindHead");
  CHECK(scene.humans[1].contact_object_index == 2);
  CHECK(scene.humans[1].pose_id == "SitArmsOnTable");

  // pure function: a rerun yields byte-identical serialization
  auto rerun = assemble_scene(graph, layouts, vocab, catalog, book, poses);
  CHECK(write_scene_json(rerun) == write_scene_json(scene));

  // no interactions, no humans
  auto calm = make_graph({desk}, {0}, {HumanAction::NoneAction});
  auto calm_scene = assemble_scene(calm, {layouts[1]}, vocab, catalog, book, poses);
  CHECK(calm_scene.humans.empty());

  // validation
  CHECK_THROWS_AS(assemble_scene(graph, {layouts[0]}, vocab, catalog, book, poses),
                  Error);
  auto masked = graph;
  masked.categories[1] = vocab.size();  // still a mask token
  CHECK_THROWS_AS(assemble_scene(masked, layouts, vocab, catalog, book, poses), Error);
}
