#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roomforge/types.hpp"

namespace roomforge::assembly {

// one retrievable furniture model: an appearance vector plus half extents;
// mesh_ref stays empty for the bundled procedural entries
struct Asset {
  std::string id;
  std::string category;
  std::vector<double> feature;   // unit L2 norm
  std::array<double, 3> size{};  // half extents, meters, positive
  std::string mesh_ref;
};

// immutable after construction; lookups by category are precomputed
class AssetCatalog {
 public:
  AssetCatalog() = default;
  explicit AssetCatalog(std::vector<Asset> assets);

  [[nodiscard]] const std::vector<Asset>& assets() const { return assets_; }
  [[nodiscard]] bool empty() const { return assets_.empty(); }
  [[nodiscard]] int size() const { return static_cast<int>(assets_.size()); }

  // indices of the assets in a category, in stored order; empty when absent
  [[nodiscard]] const std::vector<int>& in_category(const std::string& category) const;
  [[nodiscard]] bool has_category(const std::string& category) const;
  // sorted unique category names present in the catalog
  [[nodiscard]] std::vector<std::string> categories() const;

 private:
  std::vector<Asset> assets_;
  std::vector<std::pair<std::string, std::vector<int>>> by_category_;  // sorted
};

// typical half extents for a category, used by the procedural catalog and the
// scene generator; unknown categories fall back to a medium cabinet shape
std::array<double, 3> category_base_size(const std::string& category);

// deterministic procedural catalog: every category crossed with the style
// list, two size variants each; features come from category_style_feature
AssetCatalog make_builtin_catalog(const CategoryVocabulary& vocab,
                                  const std::vector<std::string>& styles,
                                  int feature_dim = 32,
                                  std::uint64_t seed = 77001);

std::string catalog_to_json(const AssetCatalog& catalog);
AssetCatalog catalog_from_json(const std::string& text,
                               const std::string& origin = "<string>");
void save_catalog(const AssetCatalog& catalog, const std::filesystem::path& path);
AssetCatalog load_catalog(const std::filesystem::path& path);

// builds a catalog from a 3D-FUTURE model_info.json: categories are mapped
// onto the vocabulary via substring aliases, sizes fall back to the category
// prior (the index file carries no geometry), unmappable rows are skipped
// with a warning
AssetCatalog ingest_model_info(const std::filesystem::path& model_info_path,
                               const CategoryVocabulary& vocab, int feature_dim = 32,
                               std::vector<std::string>* warnings = nullptr);

// lowercases, maps -/_// to spaces, collapses runs of whitespace
std::string normalize_category_name(std::string s);

// maps an external dataset category onto the vocabulary: exact normalized
// match, then a table of known aliases, then the longest substring
// containment in either direction; empty when nothing applies
std::string map_external_category(const std::string& raw,
                                  const CategoryVocabulary& vocab);

}  // namespace roomforge::assembly
