#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "namesift/namesift.h"

namespace namesift::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIntegrity = 2,
  kExitPartial = 3,
};

enum class OutputFormat { kTsv, kJson };

OutputFormat parse_output_format(std::string_view s);

struct RunSpec {
  fs::path corpus_root;
  // Task names to keep; empty keeps every task.
  std::vector<std::string> tasks;
  std::vector<Model> models;
  std::vector<NoiseMode> noise_modes;
  bool hac = false;
  bool kmeans = false;
  std::size_t reps = 10;
  KMeansOptions kmeans_options;
  fs::path output;
  OutputFormat format = OutputFormat::kTsv;
  // alpha, lambda, laplace_denominator and the feature keys; `model` and
  // `features.noise` are overridden per grid cell.
  ModelConfig base;
  LoadOptions load;
  std::size_t jobs = 1;

  // Throws ConfigError when nothing is selected or reps < 1.
  void validate() const;
};

struct TaskFailure {
  std::string location;
  std::string message;
};

struct LoadedCorpus {
  // Sorted by task name.
  std::vector<Task> tasks;
  std::vector<TaskFailure> failures;
};

// Task directories under `root`: `root` itself when it holds task.json,
// otherwise its immediate subdirectories, sorted by path.
std::vector<fs::path> discover_task_dirs(const fs::path& root);

LoadedCorpus load_corpus(const fs::path& root,
                         std::span<const std::string> filter,
                         const LoadOptions& options, std::size_t jobs);

// One report over `tasks` for a single classification configuration. When
// `assignments` is given it receives each task's Assignment by task name.
EvalReport run_classification(std::span<const Task> tasks,
                              const ModelConfig& config, std::size_t jobs,
                              std::map<std::string, Assignment>* assignments = nullptr);

// Purity/NMI of a clustering baseline on each task's entity-related
// documents, with k = |E| clamped to the number of documents. K-Means
// metrics are averaged over seeds 1..reps.
EvalReport run_clustering(std::span<const Task> tasks, ClusteringMethod method,
                          std::size_t reps, const FeatureConfig& features,
                          const KMeansOptions& options, std::size_t jobs,
                          std::map<std::string, std::vector<Clustering>>* out = nullptr);

struct GridResult {
  std::vector<EvalReport> reports;
  std::vector<TaskFailure> failures;
  std::size_t tasks_loaded = 0;
  std::size_t floored_events = 0;
};

// Every (model, noise) cell in spec order, then HAC and K-Means reports.
GridResult run_grid(const RunSpec& spec);

void write_reports(std::span<const EvalReport> reports, OutputFormat format,
                   std::ostream& out);

struct ValidationEntry {
  std::string location;
  bool passed = false;
  std::string diagnostic;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool all_passed() const;
};

ValidationReport validate_corpus(const fs::path& root,
                                 const LoadOptions& options = {});

// Runs `fn(i)` for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

// Filesystem-safe file stem for a task name.
std::string file_stem(std::string_view task_name);

// The `namesift` command line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace namesift::cli
