#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "namesift/errors.h"
#include "namesift/eval.h"
#include "oracles.h"

namespace namesift {
namespace {

const std::string kNoise(kNoiseLabel);

std::string id(std::size_t i) { return "d" + std::to_string(i + 1); }

Clustering clustering_of(const std::vector<int>& labels) {
  Clustering c;
  int blocks = 0;
  for (int l : labels) blocks = std::max(blocks, l + 1);
  c.clusters.resize(blocks);
  for (std::size_t i = 0; i < labels.size(); ++i)
    c.clusters[labels[i]].push_back(id(i));
  std::erase_if(c.clusters, [](const auto& v) { return v.empty(); });
  c.k = c.clusters.size();
  return c;
}

std::string name_of(int label) { return label == 2 ? kNoise : std::string(1, 'A' + label); }

GoldAlignment gold_of(const std::vector<int>& labels) {
  GoldAlignment g;
  for (std::size_t i = 0; i < labels.size(); ++i) g.labels[id(i)] = name_of(labels[i]);
  return g;
}

Assignment assignment_of(const std::vector<int>& labels) {
  Assignment a;
  a.labels = {"A", "B", kNoise};
  for (std::size_t i = 0; i < labels.size(); ++i)
    a.documents.push_back({id(i), name_of(labels[i]), {}});
  return a;
}

// Restricted growth strings with at most `blocks` blocks.
void for_each_partition(std::size_t n, int blocks,
                        const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> v(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) return f(v);
    for (int b = 0; b <= std::min(used, blocks - 1); ++b) {
      v[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
}

TEST(Purity, Examples) {
  EXPECT_DOUBLE_EQ(purity(clustering_of({0, 1, 2}), gold_of({0, 0, 1})), 1.0);
  EXPECT_NEAR(purity(clustering_of({0, 0, 0}), gold_of({0, 0, 1})), 2.0 / 3.0, 1e-12);
}

TEST(Nmi, Examples) {
  EXPECT_NEAR(nmi(clustering_of({0, 0, 1, 1}), gold_of({0, 0, 1, 1})), 1.0, 1e-12);
  EXPECT_NEAR(nmi(clustering_of({0, 0, 0, 0}), gold_of({0, 0, 1, 1})), 0.0, 1e-12);
  EXPECT_NEAR(nmi(clustering_of({0, 0, 1, 1}), gold_of({0, 1, 0, 1})), 0.0, 1e-12);
  EXPECT_NEAR(nmi(clustering_of({0, 0}), gold_of({0, 0})), 1.0, 1e-12);
}

TEST(F1, Examples) {
  const auto same = micro_macro_f1(assignment_of({0, 1, 2}), gold_of({0, 1, 2}));
  EXPECT_DOUBLE_EQ(same.micro, 1.0);
  EXPECT_DOUBLE_EQ(same.macro, 1.0);
  const auto f = micro_macro_f1(assignment_of({0, 2, 2}), gold_of({0, 0, 2}));
  EXPECT_NEAR(f.micro, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(f.macro, 2.0 / 3.0, 1e-3);
}

TEST(F1Bar, MeanOfMicroMacro) {
  const std::vector<F1Scores> scores = {{0.4, 0.4}, {0.6, 0.6}};
  EXPECT_DOUBLE_EQ(f1_bar(scores), 0.5);
  const std::vector<F1Scores> mixed = {{1.0, 0.0}};
  EXPECT_DOUBLE_EQ(f1_bar(mixed), 0.5);
  EXPECT_THROW(f1_bar(std::span<const F1Scores>{}), ArgumentError);
}

TEST(Errors, MissingLabels) {
  auto gold = gold_of({0, 1});
  EXPECT_THROW(purity(clustering_of({0, 0, 1}), gold), IntegrityError);
  EXPECT_THROW(nmi(clustering_of({0, 0, 1}), gold), IntegrityError);
  EXPECT_THROW(micro_macro_f1(assignment_of({0}), gold), IntegrityError);
  EXPECT_THROW(purity(Clustering{}, gold), ArgumentError);
}

TEST(EvalFilter, RealEntitiesOnly) {
  std::vector<EntityProfile> e = {{"A", "", "x", {}}, {"B", "", "y", {}}};
  std::vector<ResultDocument> d = {{"d1", "", 1, "x", {}},
                                   {"d2", "", 2, "z", {}},
                                   {"d3", "", 3, "y", {}}};
  GoldAlignment g{{{"d1", "B"}, {"d2", kNoise}, {"d3", "A"}}};
  const auto task = make_task("t", e, d, g);
  EXPECT_EQ(clustering_eval_filter(task), (std::vector<std::string>{"d1", "d3"}));
  GoldAlignment all_noise{{{"d1", kNoise}, {"d2", kNoise}, {"d3", kNoise}}};
  EXPECT_TRUE(clustering_eval_filter(make_task("t", e, d, all_noise)).empty());

  Assignment a = assignment_of({1, 2, 0});
  const auto m = evaluate_assignment(task, a);
  EXPECT_DOUBLE_EQ(*m.micro_f1, 1.0);
  EXPECT_DOUBLE_EQ(*m.purity, 1.0);
  EXPECT_NEAR(*m.nmi, 1.0, 1e-12);
  const auto none = evaluate_assignment(make_task("t", e, d, all_noise), a);
  EXPECT_FALSE(none.purity);
  EXPECT_FALSE(none.nmi);
  EXPECT_TRUE(none.micro_f1);
}

TEST(Invariance, RelabelingAndRenaming) {
  const std::vector<int> clusters = {0, 0, 1, 2, 2, 1};
  const std::vector<int> gold = {0, 0, 1, 1, 0, 2};
  const std::vector<int> permuted = {2, 2, 0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(purity(clustering_of(clusters), gold_of(gold)),
                   purity(clustering_of(permuted), gold_of(gold)));
  EXPECT_NEAR(nmi(clustering_of(clusters), gold_of(gold)),
              nmi(clustering_of(permuted), gold_of(gold)), 1e-12);
  auto renamed = clustering_of(clusters);
  std::ranges::reverse(renamed.clusters);
  EXPECT_NEAR(nmi(renamed, gold_of(gold)), nmi(clustering_of(clusters), gold_of(gold)),
              1e-12);
}

TEST(Invariance, RefinementDoesNotLowerPurity) {
  for_each_partition(6, 3, [](const std::vector<int>& gold) {
    for_each_partition(6, 3, [&](const std::vector<int>& coarse) {
      std::vector<int> fine(coarse);
      for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = coarse[i] * 2 + (i % 2);
      EXPECT_GE(purity(clustering_of(fine), gold_of(gold)) + 1e-12,
                purity(clustering_of(coarse), gold_of(gold)));
    });
  });
}

TEST(Oracle, ExhaustiveSmallPartitions) {
  for (std::size_t n = 1; n <= 6; ++n) {
    for_each_partition(n, 3, [&](const std::vector<int>& gold) {
      for_each_partition(n, 3, [&](const std::vector<int>& pred) {
        const auto c = clustering_of(pred);
        const auto g = gold_of(gold);
        const double p = purity(c, g);
        const double m = nmi(c, g);
        ASSERT_NEAR(p, oracle::purity(pred, gold), 1e-12);
        ASSERT_NEAR(m, oracle::nmi(pred, gold), 1e-12);
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 1.0 + 1e-12);
        ASSERT_GE(m, -1e-12);
        ASSERT_LE(m, 1.0 + 1e-12);
        const auto f = micro_macro_f1(assignment_of(pred), g);
        ASSERT_NEAR(f.micro, oracle::micro_f1(pred, gold), 1e-12);
        ASSERT_NEAR(f.macro, oracle::macro_f1(pred, gold), 1e-12);
      });
    });
  }
}

TEST(Aggregate, MeansOverReportingTasks) {
  std::vector<TaskMetrics> tasks(2);
  tasks[0] = {"a", 0.8, 0.4, 0.6, 0.2};
  tasks[1] = {"b", std::nullopt, std::nullopt, 1.0, 0.8};
  const auto all = aggregate(tasks);
  EXPECT_EQ(all.task, "ALL");
  EXPECT_DOUBLE_EQ(*all.purity, 0.8);
  EXPECT_DOUBLE_EQ(*all.nmi, 0.4);
  EXPECT_DOUBLE_EQ(*all.micro_f1, 0.8);
  EXPECT_DOUBLE_EQ(*all.macro_f1, 0.5);
  EXPECT_DOUBLE_EQ(*all.f1_bar(), 0.65);
  EXPECT_FALSE(TaskMetrics{}.f1_bar());
}

TEST(Report, TsvAndJson) {
  EvalReport r;
  r.model = "cosine";
  r.noise = "none";
  r.config = {{"alpha", "1"}};
  r.per_task = {{"a", std::nullopt, std::nullopt, 0.5, 0.25}};
  r.aggregate = aggregate(r.per_task);
  const std::vector<EvalReport> reports = {r};

  std::ostringstream tsv;
  write_report_tsv(reports, tsv);
  std::istringstream lines(tsv.str());
  std::string header, row, agg, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  std::getline(lines, agg);
  EXPECT_EQ(header, "task\tmodel\tnoise\tpurity\tnmi\tmicro_f1\tmacro_f1\tf1_bar");
  EXPECT_EQ(row.substr(0, 20), "a\tcosine\tnone\tNA\tNA\t");
  EXPECT_EQ(agg.substr(0, 4), "ALL\t");
  EXPECT_FALSE(std::getline(lines, extra) && !extra.empty());

  std::ostringstream json;
  write_report_json(reports, json);
  const auto j = nlohmann::json::parse(json.str());
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[0]["model"], "cosine");
  EXPECT_EQ(j[0]["config"]["alpha"], "1");
  EXPECT_TRUE(j[0]["per_task"][0]["purity"].is_null());
  EXPECT_DOUBLE_EQ(j[0]["per_task"][0]["micro_f1"].get<double>(), 0.5);
}

}  // namespace
}  // namespace namesift
