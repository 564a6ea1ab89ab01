#include "roomforge/assembly/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "roomforge/errors.hpp"
#include "roomforge/rng.hpp"

namespace roomforge::assembly {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double e = a[i] - b[i];
    d += e * e;
  }
  return d;
}

int nearest_entry(const std::vector<double>& v,
                  const std::vector<std::vector<double>>& entries) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < entries.size(); ++k) {
    double d = sq_dist(v, entries[k]);
    if (d < best_d) {  // strict: ties stay with the lowest index
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string FeatureCodebook::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

FeatureCodebook FeatureCodebook::from_json(const std::string& text,
                                           const std::string& origin) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("dim") || !j.contains("entries"))
    throw FileFormatError(origin, 0, "invalid codebook JSON");
  FeatureCodebook book;
  book.dim = j["dim"].get<int>();
  book.entries = j["entries"].get<std::vector<std::vector<double>>>();
  if (book.dim < 1) throw FileFormatError(origin, 0, "codebook dim must be positive");
  for (const auto& e : book.entries)
    if (static_cast<int>(e.size()) != book.dim)
      throw FileFormatError(origin, 0, "codebook entry has the wrong dimension");
  return book;
}

void save_codebook(const FeatureCodebook& book, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write codebook to " + path.string());
  out << book.to_json();
}

FeatureCodebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read codebook from " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return FeatureCodebook::from_json(buf.str(), path.string());
}

FeatureCodebook fit_codebook(const std::vector<std::vector<double>>& features,
                             int k, std::uint64_t seed, int iterations) {
  if (k < 1) throw Error("codebook needs at least one entry");
  if (static_cast<int>(features.size()) < k)
    throw InsufficientDataError("codebook fit needs at least " + std::to_string(k) +
                                " feature vectors, got " +
                                std::to_string(features.size()));
  const size_t n = features.size();
  const size_t dim = features[0].size();
  if (dim == 0) throw Error("feature vectors must not be empty");
  for (const auto& f : features) {
    if (f.size() != dim) throw Error("feature vectors must share one dimension");
    for (double x : f)
      if (!std::isfinite(x)) throw Error("feature vectors must be finite");
  }

  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<size_t>(k));

  // k-means++ style greedy seeding: first center at random, then each new
  // center drawn proportionally to squared distance from the chosen set
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  centers.push_back(features[rng.index(n)]);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(features[i], centers.back()));
      total += d2[i];
    }
    size_t pick;
    if (total <= 0.0) {
      pick = rng.index(n);  // all mass on existing centers; any point works
    } else {
      double u = rng.uniform01() * total;
      pick = n - 1;
      double acc = 0.0;
      for (size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(features[pick]);
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < iterations; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      int a = nearest_entry(features[i], centers);
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }

    std::vector<std::vector<double>> sums(static_cast<size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t c = 0; c < dim; ++c) sums[static_cast<size_t>(assign[i])][c] += features[i][c];
      ++counts[static_cast<size_t>(assign[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) {
        // re-seed an emptied cluster with the point farthest from its center
        size_t far = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < n; ++i) {
          double d = sq_dist(features[i], centers[static_cast<size_t>(assign[i])]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers[static_cast<size_t>(c)] = features[far];
        assign[far] = c;
        changed = true;
      } else {
        for (size_t x = 0; x < dim; ++x)
          centers[static_cast<size_t>(c)][x] =
              sums[static_cast<size_t>(c)][x] / counts[static_cast<size_t>(c)];
      }
    }
    if (!changed && iter > 0) break;
  }

  FeatureCodebook book;
  book.dim = static_cast<int>(dim);
  book.entries = std::move(centers);
  return book;
}

int quantize_feature(const std::vector<double>& v, const FeatureCodebook& book) {
  if (book.size() == 0) throw Error("codebook is empty");
  if (static_cast<int>(v.size()) != book.dim)
    throw Error("feature vector dimension does not match the codebook");
  for (double x : v)
    if (!std::isfinite(x)) throw Error("feature vector must be finite");
  return nearest_entry(v, book.entries);
}

double quantization_error(const std::vector<std::vector<double>>& features,
                          const FeatureCodebook& book) {
  if (features.empty()) return 0.0;
  double total = 0.0;
  for (const auto& f : features)
    total += sq_dist(f, book.entries[static_cast<size_t>(quantize_feature(f, book))]);
  return total / static_cast<double>(features.size());
}

std::vector<double> feature_direction(const std::string& name, int dim) {
  if (dim < 1) throw Error("feature dimension must be positive");
  Rng rng(fnv1a64(name));
  std::vector<double> v(static_cast<size_t>(dim));
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  double norm = std::sqrt(norm2);
  if (norm < 1e-12) {
    v.assign(static_cast<size_t>(dim), 0.0);
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

std::vector<double> category_style_feature(const std::string& category,
                                           const std::string& style, int dim) {
  auto cat = feature_direction("category:" + category, dim);
  auto sty = feature_direction("style:" + style, dim);
  std::vector<double> v(static_cast<size_t>(dim));
  double norm2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    v[static_cast<size_t>(i)] = sty[static_cast<size_t>(i)] + 0.3 * cat[static_cast<size_t>(i)];
    norm2 += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
  }
  double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace roomforge::assembly
