#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "namesift/corpus.h"

namespace namesift {

using FeatureId = std::uint32_t;

// Position of an element of C = D ∪ E inside a FeatureIndex. Documents come
// first in task order, then entity profiles in task order.
using ElementId = std::size_t;

// Sparse feature-id -> weight map, stored sorted by feature id. Explicit
// zeros are never stored and every weight is finite.
class FeatureVector {
 public:
  using Entry = std::pair<FeatureId, double>;

  FeatureVector() = default;

  // Sorts, sums duplicate ids and drops zeros. Throws ArgumentError on a
  // non-finite weight.
  static FeatureVector from_entries(std::vector<Entry> entries);

  double weight(FeatureId f) const;
  bool contains(FeatureId f) const;

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double sum() const;
  double l1_norm() const;
  double l2_norm() const;

  FeatureVector scaled(double factor) const;

  bool operator==(const FeatureVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

// Sparse dot product over the shared support.
double dot(const FeatureVector& a, const FeatureVector& b);

// a + factor * b.
FeatureVector add_scaled(const FeatureVector& a, const FeatureVector& b,
                         double factor);

enum class IdfNumerator {
  kPaper,   // |F_c|, distinct features of the element being weighted
  kCorpus,  // |C|, number of documents and entity profiles
};

enum class NoiseMode { kNone, kUnion, kIntersection };

enum class IntersectionSemantics {
  kExists,  // f shared by some entity and some other element
  kForall,  // f shared by every (entity, other element) pair
};

struct FeatureConfig {
  IdfNumerator idf_numerator = IdfNumerator::kCorpus;
  double log_base = std::numbers::e;
  NoiseMode noise = NoiseMode::kNone;
  IntersectionSemantics intersection_semantics = IntersectionSemantics::kExists;

  // Throws ConfigError unless log_base is one of e, 2, 10.
  void validate() const;
};

std::string_view to_string(IdfNumerator v);
std::string_view to_string(NoiseMode v);
std::string_view to_string(IntersectionSemantics v);
std::string log_base_name(double base);

IdfNumerator parse_idf_numerator(std::string_view s);
NoiseMode parse_noise_mode(std::string_view s);
IntersectionSemantics parse_intersection_semantics(std::string_view s);
double parse_log_base(std::string_view s);

enum class ElementKind { kDocument, kEntity };

struct IndexedElement {
  ElementKind kind;
  std::string id;
  // (feature, freq(f, c)) sorted by feature id.
  std::vector<std::pair<FeatureId, std::size_t>> frequencies;
  std::size_t token_count = 0;
  std::size_t max_frequency = 0;
};

// Feature dictionary, document frequencies and per-element term frequencies
// over C = D ∪ E. The noise profile is derived from this index and never
// contributes to df.
class FeatureIndex {
 public:
  FeatureIndex() = default;

  static FeatureIndex build(const Task& task);

  std::size_t feature_count() const { return tokens_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  std::size_t document_count() const { return document_count_; }
  std::size_t entity_count() const { return elements_.size() - document_count_; }

  ElementId document_element(std::size_t position) const;
  ElementId entity_element(std::size_t position) const;
  ElementId find_document(std::string_view id) const;
  ElementId find_entity(std::string_view id) const;

  const IndexedElement& element(ElementId c) const;
  std::span<const IndexedElement> elements() const { return elements_; }

  std::optional<FeatureId> find_feature(std::string_view token) const;
  const std::string& token(FeatureId f) const;

  std::size_t df(FeatureId f) const;
  std::size_t frequency(ElementId c, FeatureId f) const;
  // |F_c|
  std::size_t distinct_features(ElementId c) const;
  bool contains(ElementId c, FeatureId f) const { return frequency(c, f) > 0; }

  // Σ_c freq(f, c) and Σ_c |c| over C, for the background language model.
  std::size_t collection_frequency(FeatureId f) const;
  std::size_t collection_length() const { return collection_length_; }

 private:
  void check_feature(FeatureId f) const;

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, FeatureId> ids_;
  std::vector<std::size_t> df_;
  std::vector<std::size_t> collection_frequency_;
  std::size_t collection_length_ = 0;
  std::vector<IndexedElement> elements_;
  std::size_t document_count_ = 0;
  std::unordered_map<std::string, ElementId> document_ids_;
  std::unordered_map<std::string, ElementId> entity_ids_;
};

inline FeatureIndex build_index(const Task& task) {
  return FeatureIndex::build(task);
}

// (freq(f,c) / max_f' freq(f',c)) * log_base(N / df(f)), N per
// config.idf_numerator. Zero when f does not occur in c. Throws LookupError
// for unknown ids.
double tfidf(FeatureId f, ElementId c, const FeatureIndex& index,
             const FeatureConfig& config = {});

// tf-idf over F_c with zero weights omitted.
FeatureVector vectorize(ElementId c, const FeatureIndex& index,
                        const FeatureConfig& config = {});

// Divides by Σ|w|. Empty or all-zero input gives an empty vector.
FeatureVector l1_normalize(const FeatureVector& v);

struct NoiseProfile {
  NoiseMode kind = NoiseMode::kUnion;
  // Uniform weights 1/|F_noise|; empty when the feature set is empty.
  FeatureVector vector;
};

// ⋃_{e∈E} F_e, equally weighted.
NoiseProfile union_noise(const FeatureIndex& index);

// Features shared between an entity profile e and another element c ≠ e of
// C, equally weighted. kExists unions the pairwise intersections, kForall
// intersects them.
NoiseProfile intersection_noise(const FeatureIndex& index,
                                IntersectionSemantics semantics);

// Profile selected by config.noise, or nullopt for NoiseMode::kNone.
std::optional<NoiseProfile> build_noise_profile(const FeatureIndex& index,
                                                const FeatureConfig& config);

}  // namespace namesift
