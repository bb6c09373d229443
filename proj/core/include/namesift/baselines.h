#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "namesift/corpus.h"
#include "namesift/features.h"
#include "namesift/models.h"

namespace namesift {

enum class ClusteringMethod {
  kHacComplete,
  kKMeans,
  // Anonymous clusters obtained from a classification Assignment.
  kBootstrapped,
};

std::string_view to_string(ClusteringMethod m);

struct DocumentVector {
  std::string id;
  FeatureVector vector;
};

struct Clustering {
  // Disjoint, non-empty, covering the input documents.
  std::vector<std::vector<std::string>> clusters;
  ClusteringMethod method = ClusteringMethod::kHacComplete;
  std::size_t k = 1;
  std::optional<std::uint64_t> seed;
  // K-Means only: objective after each assignment/update round.
  std::vector<double> objective_trace;
};

// Complete-link agglomeration with distance 1 - cosine, stopped at k
// clusters. Ties merge the pair whose (smaller min doc-id, larger min
// doc-id) is lexicographically smallest. Throws ArgumentError unless
// 1 <= k <= docs.size().
Clustering hac_complete(std::span<const DocumentVector> docs, std::size_t k);

struct KMeansOptions {
  std::size_t max_iterations = 100;
};

// Lloyd iteration on L2-normalized vectors, seeded with k distinct documents
// drawn from a generator seeded with `seed`. An emptied cluster is re-seeded
// with the point farthest from its centroid. Throws ArgumentError unless
// 1 <= k <= docs.size().
Clustering kmeans(std::span<const DocumentVector> docs, std::size_t k,
                  std::uint64_t seed, const KMeansOptions& options = {});

// kmeans with seeds 1..reps.
std::vector<Clustering> run_repetitions(std::span<const DocumentVector> docs,
                                        std::size_t k, std::size_t reps,
                                        const KMeansOptions& options = {});

// tf-idf vectors for the listed documents of `task` (all documents when
// `ids` is empty is NOT implied; pass the ids you want).
std::vector<DocumentVector> document_vectors(const Task& task,
                                             std::span<const std::string> ids,
                                             const FeatureConfig& config = {});

// Groups `ids` by their assigned label, dropping the label. Cluster order
// follows first appearance in `ids`.
Clustering clustering_from_assignment(const Assignment& assignment,
                                      std::span<const std::string> ids);

// {"method", "k", "seed", "clusters": [[doc ids]]}
void write_clustering_json(std::span<const Clustering> clusterings,
                           std::ostream& out);

}  // namespace namesift
