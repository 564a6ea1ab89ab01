#include "roomforge/assembly/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "roomforge/assembly/codebook.hpp"
#include "roomforge/errors.hpp"
#include "roomforge/rng.hpp"

namespace roomforge::assembly {

namespace {

void validate_asset(const Asset& a) {
  if (a.id.empty()) throw Error("asset id must not be empty");
  if (a.category.empty()) throw Error("asset category must not be empty");
  if (a.feature.empty()) throw Error("asset '" + a.id + "' has no feature vector");
  double norm2 = 0.0;
  for (double x : a.feature) {
    if (!std::isfinite(x)) throw Error("asset '" + a.id + "' feature is not finite");
    norm2 += x * x;
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6)
    throw Error("asset '" + a.id + "' feature is not unit length");
  for (double s : a.size)
    if (!(s > 0.0) || !std::isfinite(s))
      throw Error("asset '" + a.id + "' needs positive half extents");
}

}  // namespace

AssetCatalog::AssetCatalog(std::vector<Asset> assets) : assets_(std::move(assets)) {
  std::unordered_set<std::string> seen;
  for (int i = 0; i < static_cast<int>(assets_.size()); ++i) {
    validate_asset(assets_[static_cast<size_t>(i)]);
    if (!seen.insert(assets_[static_cast<size_t>(i)].id).second)
      throw Error("duplicate asset id '" + assets_[static_cast<size_t>(i)].id + "'");
  }
  std::unordered_map<std::string, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(assets_.size()); ++i)
    groups[assets_[static_cast<size_t>(i)].category].push_back(i);
  by_category_.assign(groups.begin(), groups.end());
  std::sort(by_category_.begin(), by_category_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

const std::vector<int>& AssetCatalog::in_category(const std::string& category) const {
  static const std::vector<int> kEmpty;
  auto it = std::lower_bound(
      by_category_.begin(), by_category_.end(), category,
      [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it == by_category_.end() || it->first != category) return kEmpty;
  return it->second;
}

bool AssetCatalog::has_category(const std::string& category) const {
  return !in_category(category).empty();
}

std::vector<std::string> AssetCatalog::categories() const {
  std::vector<std::string> names;
  names.reserve(by_category_.size());
  for (const auto& [name, _] : by_category_) names.push_back(name);
  return names;
}

std::array<double, 3> category_base_size(const std::string& category) {
  static const std::unordered_map<std::string, std::array<double, 3>> kSizes = {
      {"armchair", {0.40, 0.40, 0.40}},
      {"bookshelf", {0.45, 0.18, 0.90}},
      {"cabinet", {0.45, 0.25, 0.45}},
      {"ceiling lamp", {0.25, 0.25, 0.15}},
      {"chair", {0.23, 0.25, 0.45}},
      {"children cabinet", {0.40, 0.22, 0.40}},
      {"coffee table", {0.55, 0.30, 0.22}},
      {"desk", {0.60, 0.30, 0.38}},
      {"double bed", {0.80, 1.05, 0.25}},
      {"dresser", {0.50, 0.23, 0.40}},
      {"dressing table", {0.50, 0.25, 0.70}},
      {"kids bed", {0.50, 0.90, 0.30}},
      {"nightstand", {0.25, 0.20, 0.28}},
      {"pendant lamp", {0.20, 0.20, 0.30}},
      {"shelf", {0.40, 0.15, 0.60}},
      {"single bed", {0.50, 1.00, 0.25}},
      {"sofa", {0.90, 0.45, 0.40}},
      {"stool", {0.20, 0.20, 0.23}},
      {"table", {0.60, 0.40, 0.38}},
      {"tv stand", {0.80, 0.20, 0.25}},
      {"wardrobe", {0.60, 0.30, 1.00}},
      {"chaise longue sofa", {0.80, 0.40, 0.35}},
      {"chinese chair", {0.25, 0.25, 0.50}},
      {"console table", {0.55, 0.18, 0.40}},
      {"corner side table", {0.25, 0.25, 0.28}},
      {"dining chair", {0.23, 0.25, 0.45}},
      {"dining table", {0.80, 0.45, 0.38}},
      {"l shaped sofa", {1.20, 0.80, 0.40}},
      {"lazy sofa", {0.45, 0.45, 0.35}},
      {"lounge chair", {0.38, 0.40, 0.40}},
      {"loveseat sofa", {0.70, 0.42, 0.40}},
      {"multi seat sofa", {1.10, 0.45, 0.40}},
      {"round end table", {0.25, 0.25, 0.28}},
      {"wine cabinet", {0.45, 0.22, 0.85}},
  };
  auto it = kSizes.find(category);
  if (it != kSizes.end()) return it->second;
  return {0.40, 0.25, 0.40};
}

AssetCatalog make_builtin_catalog(const CategoryVocabulary& vocab,
                                  const std::vector<std::string>& styles,
                                  int feature_dim, std::uint64_t seed) {
  if (styles.empty()) throw Error("catalog generation needs at least one style");
  std::vector<Asset> assets;
  Rng rng(seed);
  for (const std::string& category : vocab.names()) {
    std::string stem = category;
    std::replace(stem.begin(), stem.end(), ' ', '_');
    auto base = category_base_size(category);
    for (const std::string& style : styles) {
      auto style_feature = category_style_feature(category, style, feature_dim);
      for (int variant = 0; variant < 2; ++variant) {
        Asset a;
        a.id = stem + "_" + style + "_" + std::to_string(variant);
        a.category = category;
        a.feature = style_feature;
        double norm2 = 0.0;
        for (double& x : a.feature) {
          x += 0.05 * rng.normal();  // keep models of one style distinct
          norm2 += x * x;
        }
        double norm = std::sqrt(norm2);
        for (double& x : a.feature) x /= norm;
        for (int c = 0; c < 3; ++c)
          a.size[static_cast<size_t>(c)] =
              variant == 0 ? base[static_cast<size_t>(c)]
                           : base[static_cast<size_t>(c)] * rng.uniform(0.85, 1.15);
        assets.push_back(std::move(a));
      }
    }
  }
  return AssetCatalog(std::move(assets));
}

std::string catalog_to_json(const AssetCatalog& catalog) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Asset& a : catalog.assets()) {
    nlohmann::json j;
    j["id"] = a.id;
    j["category"] = a.category;
    j["feature"] = a.feature;
    j["size"] = a.size;
    if (!a.mesh_ref.empty()) j["mesh"] = a.mesh_ref;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

AssetCatalog catalog_from_json(const std::string& text, const std::string& origin) {
  auto arr = nlohmann::json::parse(text, nullptr, false);
  if (arr.is_discarded() || !arr.is_array())
    throw FileFormatError(origin, 0, "catalog must be a JSON array of assets");
  std::vector<Asset> assets;
  for (const auto& j : arr) {
    if (!j.contains("id") || !j.contains("category") || !j.contains("feature") ||
        !j.contains("size"))
      throw FileFormatError(origin, 0, "asset entry missing id/category/feature/size");
    Asset a;
    a.id = j["id"].get<std::string>();
    a.category = j["category"].get<std::string>();
    a.feature = j["feature"].get<std::vector<double>>();
    auto size = j["size"].get<std::vector<double>>();
    if (size.size() != 3)
      throw FileFormatError(origin, 0, "asset size needs exactly three entries");
    std::copy(size.begin(), size.end(), a.size.begin());
    if (j.contains("mesh")) a.mesh_ref = j["mesh"].get<std::string>();
    assets.push_back(std::move(a));
  }
  try {
    return AssetCatalog(std::move(assets));
  } catch (const Error& e) {
    throw FileFormatError(origin, 0, e.what());
  }
}

void save_catalog(const AssetCatalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write catalog to " + path.string());
  out << catalog_to_json(catalog);
}

AssetCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read catalog from " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return catalog_from_json(buf.str(), path.string());
}

std::string normalize_category_name(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c == '-' || c == '/' || c == '_') c = ' ';
  }
  std::string out;
  bool space = true;
  for (char c : s) {
    if (c == ' ') {
      if (!space) out.push_back(' ');
      space = true;
    } else {
      out.push_back(c);
      space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

// common external dataset names that do not literally contain our category
const std::unordered_map<std::string, std::string>& category_aliases() {
  static const std::unordered_map<std::string, std::string> kAliases = {
      {"king size bed", "double bed"},
      {"queen size bed", "double bed"},
      {"bed frame", "double bed"},
      {"bunk bed", "kids bed"},
      {"bookcase jewelry armoire", "bookshelf"},
      {"bookcase", "bookshelf"},
      {"drawer chest corner cabinet", "cabinet"},
      {"sideboard side cabinet console table", "console table"},
      {"three seat multi seat sofa", "multi seat sofa"},
      {"three seat multi person sofa", "multi seat sofa"},
      {"lounge chair cafe chair office chair", "lounge chair"},
      {"lounge chair book chair computer chair", "lounge chair"},
      {"classic chinese chair", "chinese chair"},
      {"barstool", "stool"},
      {"bar stool", "stool"},
      {"footstool sofastool bed end stool stool", "stool"},
      {"dressing chair", "chair"},
      {"hanging chair", "lounge chair"},
      {"folding chair", "chair"},
      {"u shaped sofa", "l shaped sofa"},
      {"couch bed", "sofa"},
      {"wall lamp", "pendant lamp"},
      {"floor lamp", "pendant lamp"},
      {"tea table", "coffee table"},
  };
  return kAliases;
}

// longest vocabulary name contained in the external name, or that contains it
std::string map_external_category(const std::string& raw,
                                  const CategoryVocabulary& vocab) {
  std::string name = normalize_category_name(raw);
  if (vocab.index_of(name)) return name;
  auto alias = category_aliases().find(name);
  if (alias != category_aliases().end() && vocab.index_of(alias->second))
    return alias->second;
  std::string best;
  for (const std::string& cat : vocab.names()) {
    bool related = name.find(cat) != std::string::npos ||
                   cat.find(name) != std::string::npos;
    if (related && cat.size() > best.size()) best = cat;
  }
  return best;  // empty when nothing matches
}

AssetCatalog ingest_model_info(const std::filesystem::path& model_info_path,
                               const CategoryVocabulary& vocab, int feature_dim,
                               std::vector<std::string>* warnings) {
  if (!std::filesystem::exists(model_info_path))
    throw MissingDatasetError("model index not found: " + model_info_path.string());
  std::ifstream in(model_info_path);
  if (!in)
    throw MissingDatasetError("cannot open model index: " + model_info_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto arr = nlohmann::json::parse(buf.str(), nullptr, false);
  if (arr.is_discarded() || !arr.is_array())
    throw FileFormatError(model_info_path.string(), 0,
                          "model index must be a JSON array");

  std::vector<Asset> assets;
  for (const auto& j : arr) {
    if (!j.contains("model_id") || !j.contains("category")) {
      if (warnings) warnings->push_back("skipping model row without model_id/category");
      continue;
    }
    std::string model_id = j["model_id"].get<std::string>();
    std::string raw_category =
        j["category"].is_string() ? j["category"].get<std::string>() : "";
    std::string category = map_external_category(raw_category, vocab);
    if (category.empty()) {
      if (warnings)
        warnings->push_back("no vocabulary category for '" + raw_category +
                            "' (model " + model_id + "); skipped");
      continue;
    }
    std::string style = "modern";
    if (j.contains("style") && j["style"].is_string() &&
        !j["style"].get<std::string>().empty())
      style = normalize_category_name(j["style"].get<std::string>());
    Asset a;
    a.id = model_id;
    a.category = category;
    a.feature = category_style_feature(category, style, feature_dim);
    a.size = category_base_size(category);  // the index file carries no geometry
    a.mesh_ref = model_id;
    assets.push_back(std::move(a));
  }
  try {
    return AssetCatalog(std::move(assets));
  } catch (const Error& e) {
    throw FileFormatError(model_info_path.string(), 0, e.what());
  }
}

}  // namespace roomforge::assembly
