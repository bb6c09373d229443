#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "namesift/baselines.h"
#include "namesift/corpus.h"
#include "namesift/models.h"

namespace namesift {

// (1/N) Σ_clusters max_class |cluster ∩ class|. Throws IntegrityError when a
// clustered document has no gold label, ArgumentError for no documents.
double purity(const Clustering& clustering, const GoldAlignment& gold);

// I(Ω;C) / ((H(Ω) + H(C)) / 2) with natural logs; 1 when both partitions
// are a single identical block.
double nmi(const Clustering& clustering, const GoldAlignment& gold);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

// One-vs-rest F1 per class. Macro averages the classes present in gold;
// micro pools TP/FP/FN over every class seen in gold or predictions.
// Throws IntegrityError if a gold document is missing from the assignment.
F1Scores micro_macro_f1(const Assignment& assignment,
                        const GoldAlignment& gold);

// Mean over tasks of (micro + macro) / 2. Throws ArgumentError when empty.
double f1_bar(std::span<const F1Scores> per_task);

// Documents whose gold label is a real entity, in task order.
std::vector<std::string> clustering_eval_filter(const Task& task);

struct TaskMetrics {
  std::string task;
  std::optional<double> purity;
  std::optional<double> nmi;
  std::optional<double> micro_f1;
  std::optional<double> macro_f1;

  std::optional<double> f1_bar() const;
};

// Unweighted mean of each metric over the tasks that report it.
TaskMetrics aggregate(std::span<const TaskMetrics> per_task,
                      std::string label = "ALL");

struct EvalReport {
  std::string model;
  std::string noise;
  // Echo of the configuration that produced the report.
  std::map<std::string, std::string> config;
  // Sorted by task name.
  std::vector<TaskMetrics> per_task;
  TaskMetrics aggregate;
};

// Metrics of a classification run on one task: F1 over all documents,
// purity/NMI over the documents with a real-entity gold label (absent if
// there are none).
TaskMetrics evaluate_assignment(const Task& task, const Assignment& assignment);

// Header: task model noise purity nmi micro_f1 macro_f1 f1_bar. One row per
// task and one aggregate row per report; missing values print as NA.
void write_report_tsv(std::span<const EvalReport> reports, std::ostream& out);
void write_report_json(std::span<const EvalReport> reports, std::ostream& out);

}  // namespace namesift
