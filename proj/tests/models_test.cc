#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "namesift/errors.h"
#include "namesift/models.h"
#include "oracles.h"
#include "synthetic_corpus.h"

namespace namesift {
namespace {

Task task_of(std::vector<std::pair<std::string, std::string>> entities,
             std::vector<std::pair<std::string, std::string>> documents) {
  std::vector<EntityProfile> e;
  for (auto& [id, text] : entities) e.push_back({id, "", text, {}});
  std::vector<ResultDocument> d;
  GoldAlignment gold;
  for (auto& [id, text] : documents) {
    d.push_back({id, "", 1, text, {}});
    gold.labels[id] = std::string(kNoiseLabel);
  }
  return make_task("t", std::move(e), std::move(d), std::move(gold));
}

ModelConfig config_of(Model model, NoiseMode noise = NoiseMode::kNone) {
  ModelConfig config;
  config.model = model;
  config.features.noise = noise;
  return config;
}

FeatureVector vec(std::vector<FeatureVector::Entry> entries) {
  return FeatureVector::from_entries(std::move(entries));
}

TEST(Similarity, CosineAndScore) {
  const auto d = vec({{0, 1.0}, {1, 1.0}});
  const auto e = vec({{0, 2.0}});
  EXPECT_NEAR(cosine_sim(d, e), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(score(d, e), 2.0);
  EXPECT_DOUBLE_EQ(cosine_sim(d, FeatureVector{}), 0.0);
}

TEST(SmoothedProfile, Examples) {
  const auto e = vec({{0, 1.0}});
  EXPECT_EQ(smoothed_profile(e, {}), l1_normalize(e));
  const FeatureVector orthogonal[] = {vec({{5, 1.0}})};
  EXPECT_EQ(smoothed_profile(e, orthogonal), l1_normalize(e));

  const FeatureVector docs[] = {vec({{0, 1.0}, {1, 1.0}})};
  const auto s = smoothed_profile(e, docs);
  EXPECT_NEAR(s.weight(0), 1.0 + 0.5 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.weight(0), 1.3536, 5e-5);
  EXPECT_NEAR(s.weight(1), 0.3536, 5e-5);

  const auto d = vec({{0, 0.3466}});
  EXPECT_NEAR(score_smoothed(d, s), 1.3536 * 0.3466, 1e-4);
  EXPECT_NEAR(score_smoothed(d, s), 0.4692, 1e-4);
  EXPECT_DOUBLE_EQ(score_smoothed(FeatureVector{}, s), 0.0);
  EXPECT_DOUBLE_EQ(score_smoothed(d, smoothed_profile(e, {})), score(d, l1_normalize(e)));
}

TEST(Bernoulli, LaplaceExamples) {
  // One entity with two features; union noise gives uniform {a: 0.5, b: 0.5}.
  const Task task = task_of({{"e1", "a b"}}, {{"d1", "a"}, {"d2", "c"}});
  const ScoringContext ctx(task, config_of(Model::kNbBernoulliLaplace, NoiseMode::kUnion));
  const std::size_t noise = ctx.noise_position();
  const FeatureId a = *ctx.index().find_feature("a");
  const FeatureId c = *ctx.index().find_feature("c");
  EXPECT_NEAR(ctx.bernoulli_log_likelihood(noise, a), std::log(0.51 / 1.01), 1e-14);
  EXPECT_NEAR(std::exp(ctx.bernoulli_log_likelihood(noise, c)), 0.009901, 1e-6);
  EXPECT_NEAR(nb_bernoulli_laplace(ctx, 0, noise),
              ctx.log_prior(noise) + std::log(0.51 / 1.01), 1e-14);
}

TEST(Bernoulli, EmptyDocumentIsPriorOnly) {
  const Task task = task_of({{"e1", "a b"}, {"e2", "c"}}, {{"d1", ""}, {"d2", "a c"}});
  const ScoringContext ctx(task, config_of(Model::kNbBernoulliLaplace, NoiseMode::kUnion));
  for (std::size_t e = 0; e < ctx.extended_entity_count(); ++e) {
    EXPECT_DOUBLE_EQ(nb_bernoulli_laplace(ctx, 0, e), ctx.log_prior(e));
  }
  // Only the per-feature denominator makes the priors a distribution.
  auto config = config_of(Model::kNbBernoulliLaplace, NoiseMode::kUnion);
  config.laplace_denominator = LaplaceDenominator::kPerFeature;
  const ScoringContext normalized(task, config);
  double total = 0.0;
  for (std::size_t e = 0; e < normalized.extended_entity_count(); ++e) {
    total += std::exp(normalized.log_prior(e));
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Multinomial, JelinekMercerExamples) {
  // p_ML(a|e1) = 1/5 and p(a|F) = 1/10.
  const Task task = task_of({{"e1", "a x x x x"}}, {{"d1", "y y y y y"}});
  const ScoringContext ctx(task, config_of(Model::kNbMultinomialJm));
  const FeatureId a = *ctx.index().find_feature("a");
  const FeatureId y = *ctx.index().find_feature("y");
  EXPECT_DOUBLE_EQ(ctx.maximum_likelihood(0, a), 0.2);
  EXPECT_DOUBLE_EQ(ctx.background_probability(a), 0.1);
  EXPECT_NEAR(ctx.jelinek_mercer_probability(0, a), 0.15, 1e-15);
  EXPECT_NEAR(ctx.jelinek_mercer_probability(0, y), 0.5 * 0.5, 1e-15);
  EXPECT_GT(ctx.jelinek_mercer_probability(0, y), 0.0);
}

TEST(Multinomial, NoiseUsesUniformProfile) {
  const Task task = task_of({{"e1", "a b"}, {"e2", "b c"}}, {{"d1", "b"}});
  const ScoringContext ctx(task, config_of(Model::kNbMultinomialJm, NoiseMode::kUnion));
  for (const char* t : {"a", "b", "c"}) {
    EXPECT_DOUBLE_EQ(ctx.maximum_likelihood(ctx.noise_position(), *ctx.index().find_feature(t)),
                     1.0 / 3.0);
  }
}

TEST(NaiveBayes, LogDomainMatchesLinearOracle) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const Task task = testing::random_micro_task(seed, 5, 6, 6);
    for (NoiseMode noise : {NoiseMode::kNone, NoiseMode::kUnion, NoiseMode::kIntersection}) {
      const oracle::NoiseSet noise_set =
          noise == NoiseMode::kNone    ? oracle::NoiseSet{}
          : noise == NoiseMode::kUnion ? oracle::union_features(task)
                                       : oracle::intersection_features(task, false);
      for (bool per_feature : {false, true}) {
        auto config = config_of(Model::kNbBernoulliLaplace, noise);
        config.alpha = 0.3;
        if (per_feature) config.laplace_denominator = LaplaceDenominator::kPerFeature;
        const ScoringContext bernoulli(task, config);
        config.model = Model::kNbMultinomialJm;
        config.laplace_denominator = LaplaceDenominator::kPaper;
        config.lambda = 0.3;
        const ScoringContext multinomial(task, config);
        for (std::size_t d = 0; d < bernoulli.document_count(); ++d) {
          for (std::size_t e = 0; e < bernoulli.extended_entity_count(); ++e) {
            const double b = oracle::bernoulli_probability(task, noise_set, d, e, 0.3,
                                                           per_feature);
            EXPECT_NEAR(std::exp(bernoulli.score(d, e)) / b, 1.0, 1e-9)
                << seed << " per_feature=" << per_feature << " e=" << e;
            if (per_feature) continue;
            const double m =
                oracle::multinomial_probability(task, noise_set, d, e, 0.3, 0.3);
            EXPECT_NEAR(std::exp(multinomial.score(d, e)) / m, 1.0, 1e-9) << seed;
          }
        }
      }
    }
  }
}

TEST(NaiveBayes, MultinomialCoefficientNeverChangesArgmax) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Task task = testing::random_micro_task(500 + seed, 6, 12, 5);
    const ScoringContext ctx(task, config_of(Model::kNbMultinomialJm, NoiseMode::kIntersection));
    for (std::size_t d = 0; d < ctx.document_count(); ++d) {
      std::vector<double> plain;
      std::vector<double> full;
      const double coefficient = log_multinomial_coefficient(ctx, d);
      EXPECT_GE(coefficient, 0.0);
      for (std::size_t e = 0; e < ctx.extended_entity_count(); ++e) {
        plain.push_back(ctx.score(d, e));
        full.push_back(plain.back() + coefficient);
      }
      EXPECT_EQ(argmax_first(plain), argmax_first(full));
    }
  }
}

TEST(NaiveBayes, NegativeWeightsAreFlooredAndCounted) {
  // Paper-mode idf goes negative when df > |F_c|.
  const Task task = task_of({{"e1", "a"}, {"e2", "a b"}}, {{"d1", "a"}, {"d2", "a b"}});
  auto config = config_of(Model::kNbBernoulliLaplace, NoiseMode::kNone);
  config.features.idf_numerator = IdfNumerator::kPaper;
  const Assignment assignment = map_documents(task, config);
  EXPECT_GT(assignment.floored_events, 0u);
  for (const auto& row : assignment.documents) {
    for (double s : row.scores) EXPECT_TRUE(std::isfinite(s));
  }
}

TEST(MapDocuments, IdenticalDocumentGoesToItsEntity) {
  const Task task = task_of({{"e1", "striker football club goals"}, {"e2", "yoga teacher"}},
                            {{"d1", "striker football club goals"}});
  const auto assignment = map_documents(task, config_of(Model::kCosine));
  EXPECT_EQ(assignment.assigned("d1"), "e1");
  EXPECT_NEAR(assignment.documents[0].scores[0], 1.0, 1e-12);
}

TEST(MapDocuments, NoiseWinsWhenOnlyItScores) {
  // Paper mode: w(a,e1) = log(2/2) = 0 while w(a,d1) = log(4/2) > 0.
  const Task task = task_of({{"e1", "a b"}}, {{"d1", "a c d e"}});
  auto config = config_of(Model::kScore, NoiseMode::kUnion);
  config.features.idf_numerator = IdfNumerator::kPaper;
  const auto assignment = map_documents(task, config);
  ASSERT_EQ(assignment.labels.back(), kNoiseLabel);
  EXPECT_DOUBLE_EQ(assignment.documents[0].scores[0], 0.0);
  EXPECT_GT(assignment.documents[0].scores[1], 0.0);
  EXPECT_EQ(assignment.assigned("d1"), kNoiseLabel);
}

TEST(MapDocuments, TiesGoToFirstEntityThenNoiseLast) {
  const Task task = task_of({{"e1", "a"}, {"e2", "b"}}, {{"d1", "zzz"}, {"d2", ""}});
  for (Model model : {Model::kCosine, Model::kScore, Model::kScoreSmoothed}) {
    for (NoiseMode noise : {NoiseMode::kNone, NoiseMode::kUnion}) {
      const auto assignment = map_documents(task, config_of(model, noise));
      EXPECT_EQ(assignment.assigned("d1"), "e1");
      EXPECT_EQ(assignment.assigned("d2"), "e1");
    }
  }
  EXPECT_EQ(argmax_first(std::vector<double>{1.0, 3.0, 3.0}), 1u);
}

TEST(MapDocuments, SingleEntityWithoutNoiseTakesEverything) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Task base = testing::random_micro_task(seed);
    Task task = base;
    task.entities.resize(1);
    for (auto& [doc, label] : task.gold.labels) label = task.entities[0].id;
    for (Model model : kAllModels) {
      for (const auto& row : map_documents(task, config_of(model)).documents) {
        EXPECT_EQ(row.assigned, task.entities[0].id);
      }
    }
  }
}

TEST(MapDocuments, ScoresCoverExtendedSetAndRealizeMaximum) {
  for (const auto& task : testing::synthetic_corpus({.tasks = 2})) {
    for (Model model : kAllModels) {
      const auto assignment =
          map_documents(task, config_of(model, NoiseMode::kIntersection));
      ASSERT_EQ(assignment.labels.size(), task.entities.size() + 1);
      for (const auto& row : assignment.documents) {
        ASSERT_EQ(row.scores.size(), assignment.labels.size());
        const double best = *std::max_element(row.scores.begin(), row.scores.end());
        const auto pos = std::find(assignment.labels.begin(), assignment.labels.end(),
                                   row.assigned) -
                         assignment.labels.begin();
        EXPECT_EQ(row.scores[static_cast<std::size_t>(pos)], best);
      }
    }
  }
}

TEST(MapDocuments, ScalingDocumentWeightsKeepsArgmax) {
  for (const auto& task : testing::synthetic_corpus({.tasks = 1})) {
    const ScoringContext ctx(task, config_of(Model::kScoreSmoothed, NoiseMode::kIntersection));
    for (std::size_t d = 0; d < ctx.document_count(); ++d) {
      for (double factor : {0.001, 3.0, 1e6}) {
        const auto scaled = ctx.document_vector(d).scaled(factor);
        std::vector<double> c0, c1, s0, s1, p0, p1;
        for (std::size_t e = 0; e < ctx.extended_entity_count(); ++e) {
          c0.push_back(cosine_sim(ctx.document_vector(d), ctx.entity_vector(e)));
          c1.push_back(cosine_sim(scaled, ctx.entity_vector(e)));
          s0.push_back(score(ctx.document_vector(d), ctx.entity_vector(e)));
          s1.push_back(score(scaled, ctx.entity_vector(e)));
          p0.push_back(score_smoothed(ctx.document_vector(d), ctx.smoothed_vector(e)));
          p1.push_back(score_smoothed(scaled, ctx.smoothed_vector(e)));
        }
        EXPECT_EQ(argmax_first(c0), argmax_first(c1));
        EXPECT_EQ(argmax_first(s0), argmax_first(s1));
        EXPECT_EQ(argmax_first(p0), argmax_first(p1));
      }
    }
  }
}

TEST(MapDocuments, EmptyExtendedSetIsAnError) {
  const Task task = task_of({}, {{"d1", "a"}});
  EXPECT_THROW(map_documents(task, config_of(Model::kCosine)), TaskError);
  // Union noise over no entities is empty, but E' still holds the noise entity.
  EXPECT_EQ(map_documents(task, config_of(Model::kCosine, NoiseMode::kUnion)).assigned("d1"),
            kNoiseLabel);
}

TEST(Assignment, TsvRoundTrip) {
  const Task task = testing::synthetic_corpus({.tasks = 1})[0];
  const auto assignment =
      map_documents(task, config_of(Model::kNbMultinomialJm, NoiseMode::kIntersection));
  std::stringstream buffer;
  write_assignment_tsv(assignment, buffer);
  const auto back = read_assignment_tsv(buffer);
  EXPECT_EQ(back.mapping(), assignment.mapping());
  for (std::size_t i = 0; i < assignment.documents.size(); ++i) {
    EXPECT_EQ(back.assigned_score(i), assignment.assigned_score(i));
  }
  std::stringstream bad("d1\tonly-two-columns\n");
  EXPECT_THROW(read_assignment_tsv(bad), FormatError);
  EXPECT_THROW(assignment.assigned("nope"), LookupError);
}

TEST(Assignment, JsonHasFullScoreMatrix) {
  const Task task = testing::synthetic_corpus({.tasks = 1})[0];
  const auto assignment = map_documents(task, config_of(Model::kCosine, NoiseMode::kUnion));
  std::stringstream buffer;
  write_assignment_json(assignment, buffer);
  const auto doc = nlohmann::json::parse(buffer.str());
  EXPECT_EQ(doc["labels"].size(), 4u);
  EXPECT_EQ(doc["documents"].size(), task.documents.size());
  EXPECT_EQ(doc["documents"][0]["scores"].size(), 4u);
}

TEST(ModelConfig, Validation) {
  ModelConfig config;
  EXPECT_NO_THROW(config.validate());
  config.alpha = 0.0;
  EXPECT_THROW(config.validate(), ConfigError);
  config.alpha = 0.01;
  config.lambda = 1.0;
  EXPECT_THROW(config.validate(), ConfigError);
  config.lambda = 0.0;
  EXPECT_THROW(config.validate(), ConfigError);
  EXPECT_EQ(parse_model("SCORE_SMOOTHED"), Model::kScoreSmoothed);
  EXPECT_EQ(parse_model("nb_multinomial"), Model::kNbMultinomialJm);
  EXPECT_THROW(parse_model("svm"), ConfigError);
}

}  // namespace
}  // namespace namesift
