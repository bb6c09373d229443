#include "namesift/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"
#include "namesift/errors.h"

namespace namesift {
namespace {

// Rows are clusters, columns gold classes.
struct Contingency {
  std::vector<std::vector<double>> counts;
  std::vector<double> row_sums;
  std::vector<double> column_sums;
  double total = 0.0;
};

Contingency contingency(const Clustering& clustering, const GoldAlignment& gold) {
  std::map<std::string, std::size_t> classes;
  for (const auto& cluster : clustering.clusters) {
    for (const auto& id : cluster) {
      const auto it = gold.labels.find(id);
      if (it == gold.labels.end()) {
        throw IntegrityError("clustered document without gold label: " + id);
      }
      classes.emplace(it->second, 0);
    }
  }
  std::size_t next = 0;
  for (auto& [label, column] : classes) column = next++;

  Contingency table;
  table.column_sums.assign(classes.size(), 0.0);
  for (const auto& cluster : clustering.clusters) {
    std::vector<double> row(classes.size(), 0.0);
    for (const auto& id : cluster) row[classes.at(gold.labels.at(id))] += 1.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      sum += row[j];
      table.column_sums[j] += row[j];
    }
    table.total += sum;
    table.row_sums.push_back(sum);
    table.counts.push_back(std::move(row));
  }
  if (table.total == 0.0) {
    throw ArgumentError("clustering contains no documents");
  }
  return table;
}

double entropy(std::span<const double> sizes, double total) {
  double h = 0.0;
  for (double size : sizes) {
    if (size > 0.0) h -= (size / total) * std::log(size / total);
  }
  return h;
}

double f1(double tp, double fp, double fn) {
  const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  return precision + recall > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
}

std::optional<double> mean(std::span<const TaskMetrics> rows,
                           std::optional<double> (*get)(const TaskMetrics&)) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& row : rows) {
    if (const auto v = get(row)) {
      sum += *v;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6f", *v);
  return buffer;
}

nlohmann::ordered_json metrics_json(const TaskMetrics& m) {
  auto value = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  return {{"task", m.task},         {"purity", value(m.purity)},
          {"nmi", value(m.nmi)},    {"micro_f1", value(m.micro_f1)},
          {"macro_f1", value(m.macro_f1)}, {"f1_bar", value(m.f1_bar())}};
}

}  // namespace

double purity(const Clustering& clustering, const GoldAlignment& gold) {
  const Contingency table = contingency(clustering, gold);
  double majority = 0.0;
  for (const auto& row : table.counts) {
    majority += *std::ranges::max_element(row);
  }
  return majority / table.total;
}

double nmi(const Clustering& clustering, const GoldAlignment& gold) {
  const Contingency table = contingency(clustering, gold);
  const double n = table.total;
  double mutual = 0.0;
  for (std::size_t k = 0; k < table.counts.size(); ++k) {
    for (std::size_t j = 0; j < table.column_sums.size(); ++j) {
      const double joint = table.counts[k][j];
      if (joint == 0.0) continue;
      mutual += (joint / n) *
                std::log(n * joint / (table.row_sums[k] * table.column_sums[j]));
    }
  }
  const double normalizer =
      (entropy(table.row_sums, n) + entropy(table.column_sums, n)) / 2.0;
  if (normalizer == 0.0) return 1.0;
  return std::clamp(mutual / normalizer, 0.0, 1.0);
}

F1Scores micro_macro_f1(const Assignment& assignment, const GoldAlignment& gold) {
  if (gold.labels.empty()) {
    throw ArgumentError("F1 needs at least one gold-labelled document");
  }
  const auto predicted = assignment.mapping();
  struct Counts {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
  };
  std::map<std::string, Counts> classes;
  std::set<std::string> gold_classes;
  for (const auto& [doc, truth] : gold.labels) {
    const auto it = predicted.find(doc);
    if (it == predicted.end()) {
      throw IntegrityError("document missing from assignment: " + doc);
    }
    gold_classes.insert(truth);
    if (it->second == truth) {
      classes[truth].tp += 1.0;
    } else {
      classes[truth].fn += 1.0;
      classes[it->second].fp += 1.0;
    }
  }

  Counts pooled;
  for (const auto& [label, c] : classes) {
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
  }
  double macro = 0.0;
  for (const auto& label : gold_classes) {
    const Counts& c = classes[label];
    macro += f1(c.tp, c.fp, c.fn);
  }
  return {f1(pooled.tp, pooled.fp, pooled.fn),
          macro / static_cast<double>(gold_classes.size())};
}

double f1_bar(std::span<const F1Scores> per_task) {
  if (per_task.empty()) throw ArgumentError("f1_bar needs at least one task");
  double total = 0.0;
  for (const auto& scores : per_task) total += (scores.micro + scores.macro) / 2.0;
  return total / static_cast<double>(per_task.size());
}

std::vector<std::string> clustering_eval_filter(const Task& task) {
  std::vector<std::string> ids;
  for (const auto& document : task.documents) {
    const auto it = task.gold.labels.find(document.id);
    if (it != task.gold.labels.end() && it->second != kNoiseLabel) {
      ids.push_back(document.id);
    }
  }
  return ids;
}

std::optional<double> TaskMetrics::f1_bar() const {
  if (!micro_f1 || !macro_f1) return std::nullopt;
  return (*micro_f1 + *macro_f1) / 2.0;
}

TaskMetrics aggregate(std::span<const TaskMetrics> per_task, std::string label) {
  TaskMetrics result;
  result.task = std::move(label);
  result.purity = mean(per_task, [](const TaskMetrics& m) { return m.purity; });
  result.nmi = mean(per_task, [](const TaskMetrics& m) { return m.nmi; });
  result.micro_f1 = mean(per_task, [](const TaskMetrics& m) { return m.micro_f1; });
  result.macro_f1 = mean(per_task, [](const TaskMetrics& m) { return m.macro_f1; });
  return result;
}

TaskMetrics evaluate_assignment(const Task& task, const Assignment& assignment) {
  TaskMetrics metrics;
  metrics.task = task.name;
  if (!task.gold.labels.empty()) {
    const F1Scores scores = micro_macro_f1(assignment, task.gold);
    metrics.micro_f1 = scores.micro;
    metrics.macro_f1 = scores.macro;
  }
  const auto related = clustering_eval_filter(task);
  if (!related.empty()) {
    const Clustering clusters = clustering_from_assignment(assignment, related);
    metrics.purity = purity(clusters, task.gold);
    metrics.nmi = nmi(clusters, task.gold);
  }
  return metrics;
}

void write_report_tsv(std::span<const EvalReport> reports, std::ostream& out) {
  out << "task\tmodel\tnoise\tpurity\tnmi\tmicro_f1\tmacro_f1\tf1_bar\n";
  auto row = [&out](const EvalReport& report, const TaskMetrics& m) {
    out << m.task << '\t' << report.model << '\t' << report.noise << '\t'
        << cell(m.purity) << '\t' << cell(m.nmi) << '\t' << cell(m.micro_f1)
        << '\t' << cell(m.macro_f1) << '\t' << cell(m.f1_bar()) << '\n';
  };
  for (const auto& report : reports) {
    for (const auto& m : report.per_task) row(report, m);
    row(report, report.aggregate);
  }
}

void write_report_json(std::span<const EvalReport> reports, std::ostream& out) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& report : reports) {
    nlohmann::ordered_json item;
    item["model"] = report.model;
    item["noise"] = report.noise;
    item["config"] = report.config;
    auto& rows = item["per_task"] = nlohmann::ordered_json::array();
    for (const auto& m : report.per_task) rows.push_back(metrics_json(m));
    item["aggregate"] = metrics_json(report.aggregate);
    doc.push_back(std::move(item));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace namesift
