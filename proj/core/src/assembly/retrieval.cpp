#include "roomforge/assembly/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roomforge/errors.hpp"

namespace roomforge::assembly {

int edit_distance(const std::string& a, const std::string& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double denom = std::sqrt(na) * std::sqrt(nb);
  return denom > 1e-12 ? dot / denom : 0.0;
}

std::string nearest_category(const AssetCatalog& catalog, const std::string& wanted) {
  std::string best;
  int best_d = std::numeric_limits<int>::max();
  for (const std::string& cat : catalog.categories()) {
    int d = edit_distance(wanted, cat);
    if (d < best_d || (d == best_d && cat < best)) {
      best_d = d;
      best = cat;
    }
  }
  return best;
}

}  // namespace

const Asset& retrieve_object(const AssetCatalog& catalog, const FeatureCodebook& book,
                             const std::string& category, int feature_code,
                             const std::array<double, 3>& size, int top_k,
                             std::vector<std::string>* warnings) {
  if (catalog.empty()) throw Error("asset catalog is empty");
  if (feature_code < 0 || feature_code >= book.size())
    throw Error("feature code " + std::to_string(feature_code) +
                " is outside the codebook");
  if (top_k < 1) throw Error("retrieval needs top_k >= 1");

  const std::vector<int>* pool = &catalog.in_category(category);
  if (pool->empty()) {
    std::string fallback = nearest_category(catalog, category);
    if (warnings)
      warnings->push_back("no assets for category '" + category + "'; retrieving from '" +
                          fallback + "'");
    pool = &catalog.in_category(fallback);
  }

  const auto& query = book.entries[static_cast<size_t>(feature_code)];
  std::vector<int> ranked = *pool;
  std::sort(ranked.begin(), ranked.end(), [&](int lhs, int rhs) {
    double cl = cosine(catalog.assets()[static_cast<size_t>(lhs)].feature, query);
    double cr = cosine(catalog.assets()[static_cast<size_t>(rhs)].feature, query);
    if (cl != cr) return cl > cr;
    return catalog.assets()[static_cast<size_t>(lhs)].id <
           catalog.assets()[static_cast<size_t>(rhs)].id;
  });
  if (static_cast<int>(ranked.size()) > top_k)
    ranked.resize(static_cast<size_t>(top_k));

  const Asset* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (int idx : ranked) {
    const Asset& a = catalog.assets()[static_cast<size_t>(idx)];
    double d = 0.0;
    for (int c = 0; c < 3; ++c) {
      double e = a.size[static_cast<size_t>(c)] - size[static_cast<size_t>(c)];
      d += e * e;
    }
    d = std::sqrt(d);
    if (d < best_d || (d == best_d && best && a.id < best->id)) {
      best_d = d;
      best = &a;
    }
  }
  return *best;
}

}  // namespace roomforge::assembly
