#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace roomforge::assembly {

// learned set of appearance-feature centroids; object nodes carry an index
// into this table instead of a raw vector
struct FeatureCodebook {
  int dim = 0;
  std::vector<std::vector<double>> entries;

  [[nodiscard]] int size() const { return static_cast<int>(entries.size()); }

  [[nodiscard]] std::string to_json() const;
  static FeatureCodebook from_json(const std::string& text,
                                   const std::string& origin = "<string>");
};

void save_codebook(const FeatureCodebook& book, const std::filesystem::path& path);
FeatureCodebook load_codebook(const std::filesystem::path& path);

// k-means with k-means++ seeding, a fixed iteration budget, and farthest-point
// re-seeding of emptied clusters; deterministic for a given seed
FeatureCodebook fit_codebook(const std::vector<std::vector<double>>& features,
                             int k, std::uint64_t seed = 20240001,
                             int iterations = 50);

// index of the nearest centroid by Euclidean distance, ties to the lowest index
int quantize_feature(const std::vector<double>& v, const FeatureCodebook& book);

// mean squared distance from each vector to its nearest centroid
double quantization_error(const std::vector<std::vector<double>>& features,
                          const FeatureCodebook& book);

// deterministic unit direction derived from a name; equal names always map to
// the same vector, distinct names are near-orthogonal in high dimension
std::vector<double> feature_direction(const std::string& name, int dim);

// appearance vector for a (category, style) pairing: the style direction
// dominates and the category contributes a smaller consistent offset
std::vector<double> category_style_feature(const std::string& category,
                                           const std::string& style, int dim);

inline constexpr int kFeatureDim = 32;
inline constexpr int kCodebookSize = 64;

}  // namespace roomforge::assembly
