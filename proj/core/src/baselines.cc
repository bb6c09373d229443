#include "namesift/baselines.h"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>

#include "json.hpp"
#include "namesift/errors.h"

namespace namesift {

std::string_view to_string(ClusteringMethod m) {
  switch (m) {
    case ClusteringMethod::kHacComplete:
      return "HAC_COMPLETE";
    case ClusteringMethod::kKMeans:
      return "KMEANS";
    case ClusteringMethod::kBootstrapped:
      return "BOOTSTRAPPED";
  }
  return "HAC_COMPLETE";
}

namespace {

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw ArgumentError("k must satisfy 1 <= k <= " + std::to_string(n) +
                        ", got " + std::to_string(k));
  }
}

// Groups point indices by label into clusters of doc ids. Clusters are
// ordered by their first member; empty labels vanish.
std::vector<std::vector<std::string>> group(std::span<const DocumentVector> docs,
                                            std::span<const std::size_t> labels) {
  std::vector<std::vector<std::string>> clusters;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(labels[i], clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].push_back(docs[i].id);
  }
  return clusters;
}

double cosine(const FeatureVector& a, const FeatureVector& b) {
  const double norms = a.l2_norm() * b.l2_norm();
  return norms == 0.0 ? 0.0 : dot(a, b) / norms;
}

}  // namespace

Clustering hac_complete(std::span<const DocumentVector> docs, std::size_t k) {
  const std::size_t n = docs.size();
  check_k(k, n);

  std::vector<std::vector<double>> distance(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      distance[i][j] = distance[j][i] = 1.0 - cosine(docs[i].vector, docs[j].vector);
    }
  }

  // Cluster slots are indexed by their founding point; a merged slot keeps
  // the lower index and the other goes inactive.
  std::vector<bool> active(n, true);
  std::vector<std::size_t> label(n);
  std::vector<const std::string*> min_id(n);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = i;
    min_id[i] = &docs[i].id;
  }

  for (std::size_t clusters = n; clusters > k; --clusters) {
    std::size_t best_a = n;
    std::size_t best_b = n;
    double best = std::numeric_limits<double>::infinity();
    std::pair<const std::string*, const std::string*> best_key{nullptr, nullptr};
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double d = distance[a][b];
        auto key = std::minmax(min_id[a], min_id[b],
                               [](const std::string* x, const std::string* y) {
                                 return *x < *y;
                               });
        const bool better =
            d < best ||
            (d == best && std::tie(*key.first, *key.second) <
                              std::tie(*best_key.first, *best_key.second));
        if (better) {
          best = d;
          best_a = a;
          best_b = b;
          best_key = {key.first, key.second};
        }
      }
    }
    // Complete link: the merged cluster is as far from x as its farther half.
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == best_a || x == best_b) continue;
      const double d = std::max(distance[best_a][x], distance[best_b][x]);
      distance[best_a][x] = distance[x][best_a] = d;
    }
    active[best_b] = false;
    if (*min_id[best_b] < *min_id[best_a]) min_id[best_a] = min_id[best_b];
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == best_b) label[i] = best_a;
    }
  }

  Clustering result;
  result.method = ClusteringMethod::kHacComplete;
  result.k = k;
  result.clusters = group(docs, label);
  return result;
}

Clustering kmeans(std::span<const DocumentVector> docs, std::size_t k,
                  std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = docs.size();
  check_k(k, n);

  // Dense L2-normalized points over the features used by `docs`.
  std::map<FeatureId, std::size_t> dims;
  for (const auto& doc : docs) {
    for (const auto& [f, w] : doc.vector.entries()) dims.emplace(f, 0);
  }
  std::size_t next = 0;
  for (auto& [f, dim] : dims) dim = next++;
  const std::size_t width = dims.size();
  std::vector<std::vector<double>> points(n, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = docs[i].vector.l2_norm();
    if (norm == 0.0) continue;
    for (const auto& [f, w] : docs[i].vector.entries()) {
      points[i][dims[f]] = w / norm;
    }
  }

  auto squared_distance = [width](const std::vector<double>& a,
                                  const std::vector<double>& b) {
    double total = 0.0;
    for (std::size_t d = 0; d < width; ++d) {
      const double diff = a[d] - b[d];
      total += diff * diff;
    }
    return total;
  };

  // k distinct documents by a partial Fisher-Yates shuffle.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<double>> centroids(k);
  for (std::size_t c = 0; c < k; ++c) centroids[c] = points[order[c]];

  auto assign = [&](std::vector<std::size_t>& labels) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_distance = squared_distance(points[i], centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(points[i], centroids[c]);
        if (d < best_distance) {
          best_distance = d;
          best = c;
        }
      }
      labels[i] = best;
    }
  };

  auto objective = [&](const std::vector<std::size_t>& labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += squared_distance(points[i], centroids[labels[i]]);
    }
    return total;
  };

  Clustering result;
  result.method = ClusteringMethod::kKMeans;
  result.k = k;
  result.seed = seed;

  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> previous;
  bool converged = false;
  for (std::size_t iteration = 0; iteration < options.max_iterations; ++iteration) {
    assign(labels);
    if (labels == previous) {
      converged = true;
      break;
    }

    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t label : labels) ++sizes[label];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      // Re-seed with the point farthest from its own centroid, taken from a
      // cluster that can spare it.
      std::size_t farthest = n;
      double farthest_distance = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] < 2) continue;
        const double d = squared_distance(points[i], centroids[labels[i]]);
        if (d > farthest_distance) {
          farthest_distance = d;
          farthest = i;
        }
      }
      --sizes[labels[farthest]];
      labels[farthest] = c;
      sizes[c] = 1;
    }

    for (auto& centroid : centroids) std::ranges::fill(centroid, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& centroid = centroids[labels[i]];
      for (std::size_t d = 0; d < width; ++d) centroid[d] += points[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& x : centroids[c]) x /= static_cast<double>(sizes[c]);
    }
    result.objective_trace.push_back(objective(labels));
    previous = labels;
  }
  if (!converged) assign(labels);

  result.clusters = group(docs, labels);
  return result;
}

std::vector<Clustering> run_repetitions(std::span<const DocumentVector> docs,
                                        std::size_t k, std::size_t reps,
                                        const KMeansOptions& options) {
  if (reps < 1) throw ArgumentError("reps must be >= 1");
  std::vector<Clustering> runs;
  runs.reserve(reps);
  for (std::size_t seed = 1; seed <= reps; ++seed) {
    runs.push_back(kmeans(docs, k, seed, options));
  }
  return runs;
}

std::vector<DocumentVector> document_vectors(const Task& task,
                                             std::span<const std::string> ids,
                                             const FeatureConfig& config) {
  // Unsupervised baselines see the result documents only.
  Task documents_only;
  documents_only.name = task.name;
  documents_only.documents = task.documents;
  const FeatureIndex index = FeatureIndex::build(documents_only);
  std::vector<DocumentVector> vectors;
  vectors.reserve(ids.size());
  for (const auto& id : ids) {
    vectors.push_back({id, vectorize(index.find_document(id), index, config)});
  }
  return vectors;
}

Clustering clustering_from_assignment(const Assignment& assignment,
                                      std::span<const std::string> ids) {
  const auto mapping = assignment.mapping();
  std::vector<std::vector<std::string>> clusters;
  std::map<std::string, std::size_t> slot;
  for (const auto& id : ids) {
    const auto it = mapping.find(id);
    if (it == mapping.end()) {
      throw LookupError("document not in assignment: " + id);
    }
    auto [s, inserted] = slot.try_emplace(it->second, clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[s->second].push_back(id);
  }
  Clustering result;
  result.method = ClusteringMethod::kBootstrapped;
  result.k = clusters.size();
  result.clusters = std::move(clusters);
  return result;
}

void write_clustering_json(std::span<const Clustering> clusterings,
                           std::ostream& out) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& clustering : clusterings) {
    nlohmann::ordered_json item;
    item["method"] = to_string(clustering.method);
    item["k"] = clustering.k;
    item["seed"] = clustering.seed ? nlohmann::ordered_json(*clustering.seed)
                                   : nlohmann::ordered_json(nullptr);
    item["clusters"] = clustering.clusters;
    doc.push_back(std::move(item));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace namesift
