#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "namesift/corpus.h"
#include "namesift/features.h"

namespace namesift {

enum class Model {
  kCosine,
  kScore,
  kScoreSmoothed,
  kNbBernoulliLaplace,
  kNbMultinomialJm,
};

inline constexpr Model kAllModels[] = {
    Model::kCosine, Model::kScore, Model::kScoreSmoothed,
    Model::kNbBernoulliLaplace, Model::kNbMultinomialJm};

std::string_view to_string(Model m);
Model parse_model(std::string_view s);

// How α enters the Laplace denominators. kPaper adds it once; kPerFeature
// adds α·|F| to the likelihood and α·|E'| to the prior denominators.
enum class LaplaceDenominator { kPaper, kPerFeature };

std::string_view to_string(LaplaceDenominator v);
LaplaceDenominator parse_laplace_denominator(std::string_view s);

struct ModelConfig {
  Model model = Model::kScoreSmoothed;
  double alpha = 0.01;
  double lambda = 0.5;
  LaplaceDenominator laplace_denominator = LaplaceDenominator::kPaper;
  FeatureConfig features;

  // Throws ConfigError for alpha <= 0, lambda outside (0,1) or a bad
  // feature config.
  void validate() const;
};

// Probabilities that come out <= 0 are clamped here before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

double cosine_sim(const FeatureVector& d, const FeatureVector& e);

// Σ_f w(f,e) · w(f,d).
double score(const FeatureVector& d, const FeatureVector& e);

// l1(e) + Σ_{d∈D} cos(e,d) · l1(d). `entity` and `documents` are raw tf-idf
// vectors.
FeatureVector smoothed_profile(const FeatureVector& entity,
                               std::span<const FeatureVector> documents);

// Σ_f w^s(f,e) · w(f,d).
double score_smoothed(const FeatureVector& d, const FeatureVector& smoothed);

// Everything that depends only on (task, config): the index, tf-idf vectors
// for D and E', smoothed profiles and the Naive Bayes parameters. Immutable
// once built, so scoring may run from any number of threads.
//
// Extended entities are addressed by position: 0..|E|-1 follow task order,
// the noise entity (when configured) is last.
class ScoringContext {
 public:
  ScoringContext(const Task& task, const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const FeatureIndex& index() const { return index_; }

  std::size_t document_count() const { return document_vectors_.size(); }
  std::size_t extended_entity_count() const { return labels_.size(); }
  bool has_noise() const { return noise_.has_value(); }
  std::size_t noise_position() const { return labels_.size() - 1; }

  // Entity ids of E' in position order; the noise entity is kNoiseLabel.
  const std::vector<std::string>& labels() const { return labels_; }
  const std::optional<NoiseProfile>& noise() const { return noise_; }

  const FeatureVector& document_vector(std::size_t doc) const;
  // w(f,e): tf-idf for real entities, uniform 1/|F| for the noise entity.
  const FeatureVector& entity_vector(std::size_t entity) const;
  // w^s(f,e). The noise entity is not smoothed.
  const FeatureVector& smoothed_vector(std::size_t entity) const;

  // Distinct features of a document with their raw frequencies.
  std::span<const std::pair<FeatureId, std::size_t>> document_features(
      std::size_t doc) const;

  double log_prior(std::size_t entity) const;
  // log p^L(f|e)
  double bernoulli_log_likelihood(std::size_t entity, FeatureId f) const;
  // p_λ(f|e) = (1-λ) p^ML(f|F_e) + λ p(f|F)
  double jelinek_mercer_probability(std::size_t entity, FeatureId f) const;
  double maximum_likelihood(std::size_t entity, FeatureId f) const;
  double background_probability(FeatureId f) const;

  // Score of `doc` against extended entity `entity` under config().model.
  double score(std::size_t doc, std::size_t entity) const;

  // Number of probabilities clamped to kProbabilityFloor while estimating
  // the Naive Bayes parameters.
  std::size_t floored_events() const { return floored_events_; }

 private:
  double floor_log(double p);

  ModelConfig config_;
  FeatureIndex index_;
  std::vector<std::string> labels_;
  std::optional<NoiseProfile> noise_;
  std::vector<FeatureVector> document_vectors_;
  std::vector<FeatureVector> entity_vectors_;
  std::vector<FeatureVector> smoothed_vectors_;

  std::vector<double> log_priors_;
  // Per entity: log p^L(f|e) for f ∈ F_e, and the shared value for f ∉ F_e.
  std::vector<FeatureVector> bernoulli_present_;
  std::vector<double> bernoulli_absent_;
  // Per entity p^ML(f|F_e).
  std::vector<FeatureVector> maximum_likelihood_;
  std::vector<double> background_;
  std::size_t floored_events_ = 0;
};

// log p^L(e) + Σ_{f∈F_d} log p^L(f|e).
double nb_bernoulli_laplace(const ScoringContext& ctx, std::size_t doc,
                            std::size_t entity);

// log p(e) + Σ_{f∈F_d} freq(f,d) · log p_λ(f|e). The multinomial coefficient
// |d|!/Π freq(f,d)! is constant across entities and omitted.
double nb_multinomial_jm(const ScoringContext& ctx, std::size_t doc,
                         std::size_t entity);

// log(|d|! / Π freq(f,d)!) for the given document.
double log_multinomial_coefficient(const ScoringContext& ctx, std::size_t doc);

// Index of the first maximum. With the noise entity placed last, real
// entities win ties over noise and earlier entities over later ones.
std::size_t argmax_first(std::span<const double> scores);

struct DocumentAssignment {
  std::string document_id;
  std::string assigned;
  // One entry per member of E', in Assignment::labels order.
  std::vector<double> scores;
};

struct Assignment {
  std::vector<std::string> labels;
  std::vector<DocumentAssignment> documents;
  std::size_t floored_events = 0;

  // Throws LookupError for an unknown document.
  const std::string& assigned(std::string_view document_id) const;
  std::map<std::string, std::string> mapping() const;
  double assigned_score(std::size_t position) const;
};

// Maps every document to the argmax of the configured score over E'.
// Throws TaskError when E' is empty.
Assignment map_documents(const Task& task, const ModelConfig& config);
Assignment map_documents(const ScoringContext& ctx);

// doc_id<TAB>assigned<TAB>score, one row per document.
void write_assignment_tsv(const Assignment& assignment, std::ostream& out);
// Reads the TSV above. Scores hold only the assigned score; labels are the
// distinct assigned values in first-seen order.
Assignment read_assignment_tsv(std::istream& in);
// Full score matrix: {"labels": [...], "documents": [{"id","assigned","scores"}]}.
void write_assignment_json(const Assignment& assignment, std::ostream& out);

}  // namespace namesift
