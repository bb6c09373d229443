#include "driver.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace namesift::cli {

OutputFormat parse_output_format(std::string_view s) {
  if (s == "tsv") return OutputFormat::kTsv;
  if (s == "json") return OutputFormat::kJson;
  throw ConfigError("format must be tsv|json, got " + std::string(s));
}

void RunSpec::validate() const {
  if (models.empty() != noise_modes.empty()) {
    throw ConfigError("models and noise modes must both be given or both empty");
  }
  if (models.empty() && !hac && !kmeans) {
    throw ConfigError("select at least one model or baseline");
  }
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  base.validate();
}

void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string file_stem(std::string_view task_name) {
  std::string stem;
  for (char ch : task_name) {
    const bool safe = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' ||
                      ch == '.';
    stem.push_back(safe ? ch : '_');
  }
  return stem.empty() ? "_" : stem;
}

std::vector<fs::path> discover_task_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw FormatError("corpus root is not a directory: " + root.string());
  }
  if (fs::is_regular_file(root / "task.json")) return {root};
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::ranges::sort(dirs);
  return dirs;
}

LoadedCorpus load_corpus(const fs::path& root,
                         std::span<const std::string> filter,
                         const LoadOptions& options, std::size_t jobs) {
  const auto dirs = discover_task_dirs(root);
  std::vector<std::optional<Task>> loaded(dirs.size());
  std::vector<std::optional<TaskFailure>> failed(dirs.size());
  parallel_for(dirs.size(), jobs, [&](std::size_t i) {
    try {
      loaded[i] = load_task(dirs[i], options);
    } catch (const std::exception& e) {
      failed[i] = TaskFailure{dirs[i].string(), e.what()};
    }
  });

  LoadedCorpus corpus;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    // A task that failed to load has no name; with a filter, only failures
    // whose directory name was asked for are reported.
    const bool wanted =
        filter.empty() ||
        std::ranges::find(filter, dirs[i].filename().string()) != filter.end();
    if (failed[i] && wanted) {
      corpus.failures.push_back(std::move(*failed[i]));
    }
    if (!loaded[i]) continue;
    if (!filter.empty() &&
        std::ranges::find(filter, loaded[i]->name) == filter.end()) {
      continue;
    }
    corpus.tasks.push_back(std::move(*loaded[i]));
  }
  std::ranges::stable_sort(corpus.tasks, {}, &Task::name);
  return corpus;
}

namespace {

std::string number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", v);
  return buffer;
}

std::map<std::string, std::string> fingerprint(const ModelConfig& config) {
  const FeatureConfig& f = config.features;
  return {
      {"model", std::string(to_string(config.model))},
      {"noise", std::string(to_string(f.noise))},
      {"alpha", number(config.alpha)},
      {"lambda", number(config.lambda)},
      {"laplace_denominator", std::string(to_string(config.laplace_denominator))},
      {"idf_numerator", std::string(to_string(f.idf_numerator))},
      {"log_base", log_base_name(f.log_base)},
      {"intersection_semantics", std::string(to_string(f.intersection_semantics))},
  };
}

}  // namespace

EvalReport run_classification(std::span<const Task> tasks,
                              const ModelConfig& config, std::size_t jobs,
                              std::map<std::string, Assignment>* assignments) {
  config.validate();
  std::vector<TaskMetrics> metrics(tasks.size());
  std::vector<Assignment> results(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    results[i] = map_documents(tasks[i], config);
    metrics[i] = evaluate_assignment(tasks[i], results[i]);
  });

  EvalReport report;
  report.model = std::string(to_string(config.model));
  report.noise = std::string(to_string(config.features.noise));
  report.config = fingerprint(config);
  std::size_t floored = 0;
  for (const auto& result : results) floored += result.floored_events;
  report.config["floored_events"] = std::to_string(floored);
  report.per_task = std::move(metrics);
  report.aggregate = aggregate(report.per_task);
  if (assignments != nullptr) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      (*assignments)[tasks[i].name] = std::move(results[i]);
    }
  }
  return report;
}

EvalReport run_clustering(std::span<const Task> tasks, ClusteringMethod method,
                          std::size_t reps, const FeatureConfig& features,
                          const KMeansOptions& options, std::size_t jobs,
                          std::map<std::string, std::vector<Clustering>>* out) {
  if (reps < 1) throw ConfigError("reps must be >= 1");
  std::vector<TaskMetrics> metrics(tasks.size());
  std::vector<std::vector<Clustering>> runs(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    metrics[i].task = task.name;
    const auto related = clustering_eval_filter(task);
    if (related.empty()) return;
    const auto vectors = document_vectors(task, related, features);
    const std::size_t k =
        std::clamp<std::size_t>(task.entities.size(), 1, vectors.size());
    if (method == ClusteringMethod::kKMeans) {
      runs[i] = run_repetitions(vectors, k, reps, options);
    } else {
      runs[i].push_back(hac_complete(vectors, k));
    }
    double purity_sum = 0.0;
    double nmi_sum = 0.0;
    for (const auto& run : runs[i]) {
      purity_sum += purity(run, task.gold);
      nmi_sum += nmi(run, task.gold);
    }
    const double count = static_cast<double>(runs[i].size());
    metrics[i].purity = purity_sum / count;
    metrics[i].nmi = nmi_sum / count;
  });

  EvalReport report;
  report.model = method == ClusteringMethod::kKMeans ? "kmeans" : "hac_complete";
  report.noise = "-";
  report.config = {{"method", std::string(to_string(method))},
                   {"idf_numerator", std::string(to_string(features.idf_numerator))},
                   {"log_base", log_base_name(features.log_base)}};
  if (method == ClusteringMethod::kKMeans) {
    report.config["reps"] = std::to_string(reps);
    report.config["max_iterations"] = std::to_string(options.max_iterations);
  }
  report.per_task = std::move(metrics);
  report.aggregate = aggregate(report.per_task);
  if (out != nullptr) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      (*out)[tasks[i].name] = std::move(runs[i]);
    }
  }
  return report;
}

GridResult run_grid(const RunSpec& spec) {
  spec.validate();
  LoadedCorpus corpus =
      load_corpus(spec.corpus_root, spec.tasks, spec.load, spec.jobs);

  GridResult result;
  result.failures = std::move(corpus.failures);
  result.tasks_loaded = corpus.tasks.size();
  for (Model model : spec.models) {
    for (NoiseMode noise : spec.noise_modes) {
      ModelConfig config = spec.base;
      config.model = model;
      config.features.noise = noise;
      result.reports.push_back(run_classification(corpus.tasks, config, spec.jobs));
      result.floored_events +=
          std::stoul(result.reports.back().config.at("floored_events"));
    }
  }
  if (spec.hac) {
    result.reports.push_back(run_clustering(corpus.tasks,
                                            ClusteringMethod::kHacComplete, 1,
                                            spec.base.features,
                                            spec.kmeans_options, spec.jobs));
  }
  if (spec.kmeans) {
    result.reports.push_back(run_clustering(corpus.tasks, ClusteringMethod::kKMeans,
                                            spec.reps, spec.base.features,
                                            spec.kmeans_options, spec.jobs));
  }
  return result;
}

void write_reports(std::span<const EvalReport> reports, OutputFormat format,
                   std::ostream& out) {
  if (format == OutputFormat::kJson) {
    write_report_json(reports, out);
  } else {
    write_report_tsv(reports, out);
  }
}

bool ValidationReport::all_passed() const {
  return std::ranges::all_of(entries, &ValidationEntry::passed);
}

ValidationReport validate_corpus(const fs::path& root, const LoadOptions& options) {
  ValidationReport report;
  std::vector<fs::path> dirs;
  try {
    dirs = discover_task_dirs(root);
  } catch (const std::exception& e) {
    report.entries.push_back({root.string(), false, e.what()});
    return report;
  }
  if (dirs.empty()) {
    report.entries.push_back({root.string(), false, "no task directories"});
  }
  for (const auto& dir : dirs) {
    ValidationEntry entry{dir.string(), true, ""};
    try {
      const Task task = load_task(dir, options);
      entry.diagnostic = task.name + ": " + std::to_string(task.entities.size()) +
                         " entities, " + std::to_string(task.documents.size()) +
                         " documents";
    } catch (const std::exception& e) {
      entry.passed = false;
      entry.diagnostic = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace namesift::cli
