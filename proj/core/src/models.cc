#include "namesift/models.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"
#include "namesift/errors.h"

namespace namesift {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::kCosine:
      return "cosine";
    case Model::kScore:
      return "score";
    case Model::kScoreSmoothed:
      return "score_smoothed";
    case Model::kNbBernoulliLaplace:
      return "nb_bernoulli";
    case Model::kNbMultinomialJm:
      return "nb_multinomial";
  }
  return "cosine";
}

Model parse_model(std::string_view s) {
  for (Model m : kAllModels) {
    if (s == to_string(m)) return m;
  }
  if (s == "COSINE") return Model::kCosine;
  if (s == "SCORE") return Model::kScore;
  if (s == "SCORE_SMOOTHED") return Model::kScoreSmoothed;
  if (s == "NB_BERNOULLI_LAPLACE") return Model::kNbBernoulliLaplace;
  if (s == "NB_MULTINOMIAL_JM") return Model::kNbMultinomialJm;
  throw ConfigError(
      "model must be cosine|score|score_smoothed|nb_bernoulli|nb_multinomial, "
      "got " + std::string(s));
}

std::string_view to_string(LaplaceDenominator v) {
  return v == LaplaceDenominator::kPaper ? "paper" : "per_feature";
}

LaplaceDenominator parse_laplace_denominator(std::string_view s) {
  if (s == "paper") return LaplaceDenominator::kPaper;
  if (s == "per_feature") return LaplaceDenominator::kPerFeature;
  throw ConfigError("laplace_denominator must be paper|per_feature, got " +
                    std::string(s));
}

void ModelConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be > 0");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ConfigError("lambda must lie in (0,1)");
  }
  features.validate();
}

double cosine_sim(const FeatureVector& d, const FeatureVector& e) {
  const double norms = d.l2_norm() * e.l2_norm();
  if (norms == 0.0) return 0.0;
  return dot(d, e) / norms;
}

double score(const FeatureVector& d, const FeatureVector& e) {
  return dot(d, e);
}

FeatureVector smoothed_profile(const FeatureVector& entity,
                               std::span<const FeatureVector> documents) {
  const FeatureVector base = l1_normalize(entity);
  std::vector<FeatureVector::Entry> entries(base.entries().begin(),
                                            base.entries().end());
  for (const auto& document : documents) {
    const double similarity = cosine_sim(entity, document);
    if (similarity == 0.0) continue;
    const double norm = document.l1_norm();
    for (const auto& [f, w] : document.entries()) {
      entries.emplace_back(f, similarity * (w / norm));
    }
  }
  return FeatureVector::from_entries(std::move(entries));
}

double score_smoothed(const FeatureVector& d, const FeatureVector& smoothed) {
  return dot(d, smoothed);
}

ScoringContext::ScoringContext(const Task& task, const ModelConfig& config)
    : config_(config), index_(FeatureIndex::build(task)) {
  config_.validate();
  const FeatureConfig& fc = config_.features;

  for (const auto& entity : task.entities) labels_.push_back(entity.id);
  noise_ = build_noise_profile(index_, fc);
  if (noise_) labels_.emplace_back(kNoiseLabel);
  if (labels_.empty()) {
    throw TaskError(task.name + ": no entities and no noise profile");
  }

  document_vectors_.reserve(index_.document_count());
  for (std::size_t d = 0; d < index_.document_count(); ++d) {
    document_vectors_.push_back(vectorize(index_.document_element(d), index_, fc));
  }
  entity_vectors_.reserve(labels_.size());
  for (std::size_t e = 0; e < index_.entity_count(); ++e) {
    entity_vectors_.push_back(vectorize(index_.entity_element(e), index_, fc));
  }
  if (noise_) entity_vectors_.push_back(noise_->vector);

  smoothed_vectors_.reserve(labels_.size());
  for (std::size_t e = 0; e < index_.entity_count(); ++e) {
    smoothed_vectors_.push_back(
        namesift::smoothed_profile(entity_vectors_[e], document_vectors_));
  }
  if (noise_) smoothed_vectors_.push_back(noise_->vector);

  // Laplace estimates over the weight vectors w(f, e).
  const double alpha = config_.alpha;
  const bool per_feature =
      config_.laplace_denominator == LaplaceDenominator::kPerFeature;
  std::vector<double> mass(labels_.size());
  double total_mass = 0.0;
  for (std::size_t e = 0; e < labels_.size(); ++e) {
    mass[e] = entity_vectors_[e].sum();
    total_mass += mass[e];
  }
  const double prior_denominator =
      total_mass + (per_feature ? alpha * static_cast<double>(labels_.size())
                                : alpha);
  const double vocabulary = static_cast<double>(index_.feature_count());
  for (std::size_t e = 0; e < labels_.size(); ++e) {
    log_priors_.push_back(floor_log((mass[e] + alpha) / prior_denominator));
    const double denominator =
        mass[e] + (per_feature ? alpha * vocabulary : alpha);
    std::vector<FeatureVector::Entry> present;
    present.reserve(entity_vectors_[e].size());
    const double absent = floor_log(alpha / denominator);
    for (const auto& [f, w] : entity_vectors_[e].entries()) {
      // Stored as an offset from the absent-feature value so that an exact
      // zero offset can be dropped without changing the lookup.
      present.emplace_back(f, floor_log((w + alpha) / denominator) - absent);
    }
    bernoulli_present_.push_back(FeatureVector::from_entries(std::move(present)));
    bernoulli_absent_.push_back(absent);
  }

  // Jelinek-Mercer: maximum-likelihood term per entity plus the background.
  for (std::size_t e = 0; e < index_.entity_count(); ++e) {
    const IndexedElement& element = index_.element(index_.entity_element(e));
    std::vector<FeatureVector::Entry> ml;
    ml.reserve(element.frequencies.size());
    for (const auto& [f, freq] : element.frequencies) {
      ml.emplace_back(f, static_cast<double>(freq) /
                             static_cast<double>(element.token_count));
    }
    maximum_likelihood_.push_back(FeatureVector::from_entries(std::move(ml)));
  }
  if (noise_) maximum_likelihood_.push_back(noise_->vector);

  background_.resize(index_.feature_count());
  const double length = static_cast<double>(index_.collection_length());
  for (FeatureId f = 0; f < background_.size(); ++f) {
    background_[f] = static_cast<double>(index_.collection_frequency(f)) / length;
  }
}

double ScoringContext::floor_log(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    ++floored_events_;
    p = kProbabilityFloor;
  }
  return std::log(p);
}

const FeatureVector& ScoringContext::document_vector(std::size_t doc) const {
  if (doc >= document_vectors_.size()) throw LookupError("document position");
  return document_vectors_[doc];
}

const FeatureVector& ScoringContext::entity_vector(std::size_t entity) const {
  if (entity >= entity_vectors_.size()) throw LookupError("entity position");
  return entity_vectors_[entity];
}

const FeatureVector& ScoringContext::smoothed_vector(std::size_t entity) const {
  if (entity >= smoothed_vectors_.size()) throw LookupError("entity position");
  return smoothed_vectors_[entity];
}

std::span<const std::pair<FeatureId, std::size_t>>
ScoringContext::document_features(std::size_t doc) const {
  return index_.element(index_.document_element(doc)).frequencies;
}

double ScoringContext::log_prior(std::size_t entity) const {
  if (entity >= log_priors_.size()) throw LookupError("entity position");
  return log_priors_[entity];
}

double ScoringContext::bernoulli_log_likelihood(std::size_t entity,
                                                FeatureId f) const {
  if (entity >= bernoulli_absent_.size()) throw LookupError("entity position");
  return bernoulli_absent_[entity] + bernoulli_present_[entity].weight(f);
}

double ScoringContext::maximum_likelihood(std::size_t entity, FeatureId f) const {
  if (entity >= maximum_likelihood_.size()) throw LookupError("entity position");
  return maximum_likelihood_[entity].weight(f);
}

double ScoringContext::background_probability(FeatureId f) const {
  if (f >= background_.size()) throw LookupError("unknown feature");
  return background_[f];
}

double ScoringContext::jelinek_mercer_probability(std::size_t entity,
                                                  FeatureId f) const {
  const double lambda = config_.lambda;
  return (1.0 - lambda) * maximum_likelihood(entity, f) +
         lambda * background_probability(f);
}

double ScoringContext::score(std::size_t doc, std::size_t entity) const {
  switch (config_.model) {
    case Model::kCosine:
      return cosine_sim(document_vector(doc), entity_vector(entity));
    case Model::kScore:
      return namesift::score(document_vector(doc), entity_vector(entity));
    case Model::kScoreSmoothed:
      return score_smoothed(document_vector(doc), smoothed_vector(entity));
    case Model::kNbBernoulliLaplace:
      return nb_bernoulli_laplace(*this, doc, entity);
    case Model::kNbMultinomialJm:
      return nb_multinomial_jm(*this, doc, entity);
  }
  return 0.0;
}

double nb_bernoulli_laplace(const ScoringContext& ctx, std::size_t doc,
                            std::size_t entity) {
  double total = ctx.log_prior(entity);
  for (const auto& [f, freq] : ctx.document_features(doc)) {
    total += ctx.bernoulli_log_likelihood(entity, f);
  }
  return total;
}

double nb_multinomial_jm(const ScoringContext& ctx, std::size_t doc,
                         std::size_t entity) {
  double total = ctx.log_prior(entity);
  for (const auto& [f, freq] : ctx.document_features(doc)) {
    const double p = std::max(ctx.jelinek_mercer_probability(entity, f),
                              kProbabilityFloor);
    total += static_cast<double>(freq) * std::log(p);
  }
  return total;
}

double log_multinomial_coefficient(const ScoringContext& ctx, std::size_t doc) {
  const auto features = ctx.document_features(doc);
  std::size_t length = 0;
  double denominator = 0.0;
  for (const auto& [f, freq] : features) {
    length += freq;
    denominator += std::lgamma(static_cast<double>(freq) + 1.0);
  }
  return std::lgamma(static_cast<double>(length) + 1.0) - denominator;
}

std::size_t argmax_first(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

const std::string& Assignment::assigned(std::string_view document_id) const {
  for (const auto& document : documents) {
    if (document.document_id == document_id) return document.assigned;
  }
  throw LookupError("document not in assignment: " + std::string(document_id));
}

std::map<std::string, std::string> Assignment::mapping() const {
  std::map<std::string, std::string> result;
  for (const auto& document : documents) {
    result.emplace(document.document_id, document.assigned);
  }
  return result;
}

double Assignment::assigned_score(std::size_t position) const {
  const DocumentAssignment& document = documents.at(position);
  for (std::size_t i = 0; i < labels.size() && i < document.scores.size(); ++i) {
    if (labels[i] == document.assigned) return document.scores[i];
  }
  return document.scores.empty() ? 0.0 : document.scores.front();
}

Assignment map_documents(const ScoringContext& ctx) {
  Assignment assignment;
  assignment.labels = ctx.labels();
  assignment.floored_events = ctx.floored_events();
  const auto& elements = ctx.index().elements();
  assignment.documents.reserve(ctx.document_count());
  for (std::size_t d = 0; d < ctx.document_count(); ++d) {
    DocumentAssignment row;
    row.document_id = elements[d].id;
    row.scores.resize(ctx.extended_entity_count());
    for (std::size_t e = 0; e < row.scores.size(); ++e) {
      row.scores[e] = ctx.score(d, e);
    }
    row.assigned = assignment.labels[argmax_first(row.scores)];
    assignment.documents.push_back(std::move(row));
  }
  return assignment;
}

Assignment map_documents(const Task& task, const ModelConfig& config) {
  return map_documents(ScoringContext(task, config));
}

namespace {

std::string format_score(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

void write_assignment_tsv(const Assignment& assignment, std::ostream& out) {
  for (std::size_t i = 0; i < assignment.documents.size(); ++i) {
    const auto& row = assignment.documents[i];
    out << row.document_id << '\t' << row.assigned << '\t'
        << format_score(assignment.assigned_score(i)) << '\n';
  }
}

Assignment read_assignment_tsv(std::istream& in) {
  Assignment assignment;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::size_t first = line.find('\t');
    const std::size_t second =
        first == std::string::npos ? std::string::npos : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw FormatError("assignment line " + std::to_string(line_number) +
                        ": expected doc_id<TAB>assigned<TAB>score");
    }
    DocumentAssignment row;
    row.document_id = line.substr(0, first);
    row.assigned = line.substr(first + 1, second - first - 1);
    try {
      row.scores.push_back(std::stod(line.substr(second + 1)));
    } catch (const std::exception&) {
      throw FormatError("assignment line " + std::to_string(line_number) +
                        ": bad score");
    }
    if (std::ranges::find(assignment.labels, row.assigned) ==
        assignment.labels.end()) {
      assignment.labels.push_back(row.assigned);
    }
    assignment.documents.push_back(std::move(row));
  }
  // Scores hold only the assigned column; keep them aligned to one label.
  for (auto& row : assignment.documents) {
    std::vector<double> scores(assignment.labels.size(), -std::numeric_limits<double>::infinity());
    const auto it = std::ranges::find(assignment.labels, row.assigned);
    scores[static_cast<std::size_t>(it - assignment.labels.begin())] =
        row.scores.front();
    row.scores = std::move(scores);
  }
  return assignment;
}

void write_assignment_json(const Assignment& assignment, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["labels"] = assignment.labels;
  doc["floored_events"] = assignment.floored_events;
  auto& rows = doc["documents"] = nlohmann::ordered_json::array();
  for (const auto& row : assignment.documents) {
    rows.push_back({{"id", row.document_id},
                    {"assigned", row.assigned},
                    {"scores", row.scores}});
  }
  out << doc.dump(2) << '\n';
}

}  // namespace namesift
