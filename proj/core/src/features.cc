#include "namesift/features.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "namesift/errors.h"

namespace namesift {

FeatureVector FeatureVector::from_entries(std::vector<Entry> entries) {
  std::ranges::sort(entries, {}, &Entry::first);
  FeatureVector v;
  v.entries_.reserve(entries.size());
  for (const auto& [f, w] : entries) {
    if (!std::isfinite(w)) {
      throw ArgumentError("non-finite weight for feature " + std::to_string(f));
    }
    if (!v.entries_.empty() && v.entries_.back().first == f) {
      v.entries_.back().second += w;
    } else {
      v.entries_.emplace_back(f, w);
    }
  }
  std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0.0; });
  return v;
}

double FeatureVector::weight(FeatureId f) const {
  const auto it = std::ranges::lower_bound(entries_, f, {}, &Entry::first);
  return (it != entries_.end() && it->first == f) ? it->second : 0.0;
}

bool FeatureVector::contains(FeatureId f) const {
  const auto it = std::ranges::lower_bound(entries_, f, {}, &Entry::first);
  return it != entries_.end() && it->first == f;
}

double FeatureVector::sum() const {
  double total = 0.0;
  for (const auto& [f, w] : entries_) total += w;
  return total;
}

double FeatureVector::l1_norm() const {
  double total = 0.0;
  for (const auto& [f, w] : entries_) total += std::abs(w);
  return total;
}

double FeatureVector::l2_norm() const {
  double total = 0.0;
  for (const auto& [f, w] : entries_) total += w * w;
  return std::sqrt(total);
}

FeatureVector FeatureVector::scaled(double factor) const {
  std::vector<Entry> entries = entries_;
  for (auto& [f, w] : entries) w *= factor;
  return from_entries(std::move(entries));
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  const auto x = a.entries();
  const auto y = b.entries();
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first < y[j].first) {
      ++i;
    } else if (y[j].first < x[i].first) {
      ++j;
    } else {
      total += x[i].second * y[j].second;
      ++i;
      ++j;
    }
  }
  return total;
}

FeatureVector add_scaled(const FeatureVector& a, const FeatureVector& b,
                         double factor) {
  std::vector<FeatureVector::Entry> entries(a.entries().begin(),
                                            a.entries().end());
  entries.reserve(a.size() + b.size());
  for (const auto& [f, w] : b.entries()) entries.emplace_back(f, factor * w);
  return FeatureVector::from_entries(std::move(entries));
}

void FeatureConfig::validate() const {
  if (log_base != std::numbers::e && log_base != 2.0 && log_base != 10.0) {
    throw ConfigError("log_base must be e, 2 or 10");
  }
}

std::string_view to_string(IdfNumerator v) {
  return v == IdfNumerator::kPaper ? "paper" : "corpus";
}

std::string_view to_string(NoiseMode v) {
  switch (v) {
    case NoiseMode::kNone:
      return "none";
    case NoiseMode::kUnion:
      return "union";
    case NoiseMode::kIntersection:
      return "intersection";
  }
  return "none";
}

std::string_view to_string(IntersectionSemantics v) {
  return v == IntersectionSemantics::kExists ? "exists" : "forall";
}

std::string log_base_name(double base) {
  if (base == 2.0) return "2";
  if (base == 10.0) return "10";
  return "e";
}

IdfNumerator parse_idf_numerator(std::string_view s) {
  if (s == "paper") return IdfNumerator::kPaper;
  if (s == "corpus") return IdfNumerator::kCorpus;
  throw ConfigError("idf_numerator must be paper|corpus, got " + std::string(s));
}

NoiseMode parse_noise_mode(std::string_view s) {
  if (s == "none") return NoiseMode::kNone;
  if (s == "union") return NoiseMode::kUnion;
  if (s == "intersection") return NoiseMode::kIntersection;
  throw ConfigError("noise must be none|union|intersection, got " +
                    std::string(s));
}

IntersectionSemantics parse_intersection_semantics(std::string_view s) {
  if (s == "exists") return IntersectionSemantics::kExists;
  if (s == "forall") return IntersectionSemantics::kForall;
  throw ConfigError("intersection_semantics must be exists|forall, got " +
                    std::string(s));
}

double parse_log_base(std::string_view s) {
  if (s == "e") return std::numbers::e;
  if (s == "2") return 2.0;
  if (s == "10") return 10.0;
  throw ConfigError("log_base must be e|2|10, got " + std::string(s));
}

FeatureIndex FeatureIndex::build(const Task& task) {
  FeatureIndex index;
  index.document_count_ = task.documents.size();
  index.elements_.reserve(task.documents.size() + task.entities.size());

  auto add_element = [&index](ElementKind kind, const std::string& id,
                              const std::vector<std::string>& tokens) {
    std::unordered_map<FeatureId, std::size_t> counts;
    for (const auto& token : tokens) {
      auto [it, inserted] = index.ids_.try_emplace(
          token, static_cast<FeatureId>(index.tokens_.size()));
      if (inserted) {
        index.tokens_.push_back(token);
        index.df_.push_back(0);
        index.collection_frequency_.push_back(0);
      }
      ++counts[it->second];
    }
    IndexedElement element{kind, id, {}, tokens.size(), 0};
    element.frequencies.assign(counts.begin(), counts.end());
    std::ranges::sort(element.frequencies);
    for (const auto& [f, n] : element.frequencies) {
      ++index.df_[f];
      index.collection_frequency_[f] += n;
      element.max_frequency = std::max(element.max_frequency, n);
    }
    index.collection_length_ += tokens.size();
    index.elements_.push_back(std::move(element));
  };

  for (const auto& document : task.documents) {
    index.document_ids_.emplace(document.id, index.elements_.size());
    add_element(ElementKind::kDocument, document.id, document.tokens);
  }
  for (const auto& entity : task.entities) {
    index.entity_ids_.emplace(entity.id, index.elements_.size());
    add_element(ElementKind::kEntity, entity.id, entity.tokens);
  }
  return index;
}

ElementId FeatureIndex::document_element(std::size_t position) const {
  if (position >= document_count_) {
    throw LookupError("document position out of range");
  }
  return position;
}

ElementId FeatureIndex::entity_element(std::size_t position) const {
  if (position >= entity_count()) {
    throw LookupError("entity position out of range");
  }
  return document_count_ + position;
}

ElementId FeatureIndex::find_document(std::string_view id) const {
  const auto it = document_ids_.find(std::string(id));
  if (it == document_ids_.end()) {
    throw LookupError("unknown document id " + std::string(id));
  }
  return it->second;
}

ElementId FeatureIndex::find_entity(std::string_view id) const {
  const auto it = entity_ids_.find(std::string(id));
  if (it == entity_ids_.end()) {
    throw LookupError("unknown entity id " + std::string(id));
  }
  return it->second;
}

const IndexedElement& FeatureIndex::element(ElementId c) const {
  if (c >= elements_.size()) {
    throw LookupError("unknown element " + std::to_string(c));
  }
  return elements_[c];
}

std::optional<FeatureId> FeatureIndex::find_feature(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void FeatureIndex::check_feature(FeatureId f) const {
  if (f >= tokens_.size()) {
    throw LookupError("unknown feature " + std::to_string(f));
  }
}

const std::string& FeatureIndex::token(FeatureId f) const {
  check_feature(f);
  return tokens_[f];
}

std::size_t FeatureIndex::df(FeatureId f) const {
  check_feature(f);
  return df_[f];
}

std::size_t FeatureIndex::frequency(ElementId c, FeatureId f) const {
  check_feature(f);
  const auto& freqs = element(c).frequencies;
  const auto it = std::ranges::lower_bound(
      freqs, f, {}, &std::pair<FeatureId, std::size_t>::first);
  return (it != freqs.end() && it->first == f) ? it->second : 0;
}

std::size_t FeatureIndex::distinct_features(ElementId c) const {
  return element(c).frequencies.size();
}

std::size_t FeatureIndex::collection_frequency(FeatureId f) const {
  check_feature(f);
  return collection_frequency_[f];
}

namespace {

double log_in_base(double x, double base) {
  if (base == 2.0) return std::log2(x);
  if (base == 10.0) return std::log10(x);
  if (base == std::numbers::e) return std::log(x);
  return std::log(x) / std::log(base);
}

double weight_of(const IndexedElement& element, std::size_t freq,
                 std::size_t df, std::size_t corpus_size,
                 const FeatureConfig& config) {
  const double tf = static_cast<double>(freq) /
                    static_cast<double>(element.max_frequency);
  const double numerator = config.idf_numerator == IdfNumerator::kPaper
                               ? static_cast<double>(element.frequencies.size())
                               : static_cast<double>(corpus_size);
  return tf * log_in_base(numerator / static_cast<double>(df), config.log_base);
}

NoiseProfile uniform_profile(NoiseMode kind, const std::vector<FeatureId>& features) {
  NoiseProfile profile;
  profile.kind = kind;
  if (features.empty()) return profile;
  const double w = 1.0 / static_cast<double>(features.size());
  std::vector<FeatureVector::Entry> entries;
  entries.reserve(features.size());
  for (FeatureId f : features) entries.emplace_back(f, w);
  profile.vector = FeatureVector::from_entries(std::move(entries));
  return profile;
}

}  // namespace

double tfidf(FeatureId f, ElementId c, const FeatureIndex& index,
             const FeatureConfig& config) {
  const std::size_t freq = index.frequency(c, f);
  if (freq == 0) return 0.0;
  return weight_of(index.element(c), freq, index.df(f),
                   index.element_count(), config);
}

FeatureVector vectorize(ElementId c, const FeatureIndex& index,
                        const FeatureConfig& config) {
  const IndexedElement& element = index.element(c);
  std::vector<FeatureVector::Entry> entries;
  entries.reserve(element.frequencies.size());
  for (const auto& [f, freq] : element.frequencies) {
    entries.emplace_back(f, weight_of(element, freq, index.df(f),
                                      index.element_count(), config));
  }
  return FeatureVector::from_entries(std::move(entries));
}

FeatureVector l1_normalize(const FeatureVector& v) {
  const double norm = v.l1_norm();
  if (norm == 0.0) return {};
  return v.scaled(1.0 / norm);
}

NoiseProfile union_noise(const FeatureIndex& index) {
  std::vector<bool> member(index.feature_count(), false);
  for (std::size_t e = 0; e < index.entity_count(); ++e) {
    for (const auto& [f, freq] : index.element(index.entity_element(e)).frequencies) {
      member[f] = true;
    }
  }
  std::vector<FeatureId> features;
  for (FeatureId f = 0; f < member.size(); ++f) {
    if (member[f]) features.push_back(f);
  }
  return uniform_profile(NoiseMode::kUnion, features);
}

NoiseProfile intersection_noise(const FeatureIndex& index,
                                IntersectionSemantics semantics) {
  const std::size_t entities = index.entity_count();
  const std::size_t elements = index.element_count();
  std::vector<FeatureId> features;

  if (semantics == IntersectionSemantics::kExists) {
    // f ∈ F_e ∩ F_c for some c ≠ e exactly when an entity contains f and at
    // least one other element of C does too.
    std::vector<bool> member(index.feature_count(), false);
    for (std::size_t e = 0; e < entities; ++e) {
      for (const auto& [f, freq] : index.element(index.entity_element(e)).frequencies) {
        if (index.df(f) >= 2) member[f] = true;
      }
    }
    for (FeatureId f = 0; f < member.size(); ++f) {
      if (member[f]) features.push_back(f);
    }
    return uniform_profile(NoiseMode::kIntersection, features);
  }

  // kForall: with |E| >= 1 and |C| >= 2 every element of C takes part in
  // some (e, c) pair, either as e or as c, so f must occur in all of C.
  if (entities == 0 || elements < 2) {
    return uniform_profile(NoiseMode::kIntersection, features);
  }
  for (FeatureId f = 0; f < index.feature_count(); ++f) {
    if (index.df(f) == elements) features.push_back(f);
  }
  return uniform_profile(NoiseMode::kIntersection, features);
}

std::optional<NoiseProfile> build_noise_profile(const FeatureIndex& index,
                                                const FeatureConfig& config) {
  switch (config.noise) {
    case NoiseMode::kNone:
      return std::nullopt;
    case NoiseMode::kUnion:
      return union_noise(index);
    case NoiseMode::kIntersection:
      return intersection_noise(index, config.intersection_semantics);
  }
  return std::nullopt;
}

}  // namespace namesift
