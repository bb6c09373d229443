#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "driver.h"
#include "json.hpp"

namespace namesift::cli {
namespace {

// Option values shared by the subcommands, as strings until validated.
struct Options {
  std::string corpus;
  std::string tasks;
  std::size_t jobs = 1;
  std::string format = "tsv";
  std::string output;
  bool strip_markup = false;
  bool stop_words = false;
  std::string config;

  std::string model = "score_smoothed";
  std::string models = "cosine,score,score_smoothed,nb_bernoulli,nb_multinomial";
  std::string noise;
  double alpha = 0.01;
  double lambda = 0.5;
  std::string laplace_denominator = "paper";
  std::string idf_numerator = "corpus";
  std::string log_base = "e";
  std::string intersection_semantics = "exists";

  std::string method = "hac";
  bool hac = false;
  bool kmeans = false;
  std::size_t reps = 10;
  std::size_t max_iterations = 100;

  std::string assignments;
  std::string scores_json;
  std::string clusters;
  std::string label = "external";
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string env_name(const std::string& key) {
  std::string name = "NAMESIFT_";
  for (char ch : key) {
    name.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(ch)));
  }
  return name;
}

CLI::Option* keyed(CLI::App* app, const std::string& key, auto& target,
                   const std::string& help) {
  return app->add_option("--" + key, target, help)->envname(env_name(key));
}

CLI::Option* keyed_flag(CLI::App* app, const std::string& key, bool& target,
                        const std::string& help) {
  return app->add_flag("--" + key, target, help)->envname(env_name(key));
}

void add_common(CLI::App* app, Options& o) {
  keyed(app, "corpus", o.corpus, "Corpus root (one directory per task)")->required();
  keyed(app, "tasks", o.tasks, "Comma-separated task names to keep");
  keyed(app, "jobs", o.jobs, "Tasks processed in parallel")
      ->check(CLI::PositiveNumber);
  keyed(app, "format", o.format, "Report format")
      ->check(CLI::IsMember({"tsv", "json"}));
  keyed(app, "output", o.output, "Report file (default: stdout)");
  keyed_flag(app, "strip_markup", o.strip_markup,
             "Strip HTML from every body before tokenizing");
  keyed_flag(app, "stop_words", o.stop_words, "Drop English stop words");
  app->add_option("--config", o.config,
                  "JSON file of option values; flags and env vars override it");
}

void add_features(CLI::App* app, Options& o) {
  keyed(app, "idf_numerator", o.idf_numerator, "paper|corpus")
      ->check(CLI::IsMember({"paper", "corpus"}));
  keyed(app, "log_base", o.log_base, "e|2|10")->check(CLI::IsMember({"e", "2", "10"}));
  keyed(app, "intersection_semantics", o.intersection_semantics, "exists|forall")
      ->check(CLI::IsMember({"exists", "forall"}));
}

void add_model_params(CLI::App* app, Options& o) {
  add_features(app, o);
  keyed(app, "alpha", o.alpha, "Laplace smoothing factor");
  keyed(app, "lambda", o.lambda, "Jelinek-Mercer mixing weight");
  keyed(app, "laplace_denominator", o.laplace_denominator, "paper|per_feature")
      ->check(CLI::IsMember({"paper", "per_feature"}));
}

void add_kmeans_params(CLI::App* app, Options& o) {
  keyed(app, "reps", o.reps, "K-Means repetitions (seeds 1..reps)")
      ->check(CLI::PositiveNumber);
  keyed(app, "max_iterations", o.max_iterations, "K-Means iteration cap")
      ->check(CLI::PositiveNumber);
}

LoadOptions load_options(const Options& o) {
  LoadOptions options;
  options.strip_markup = o.strip_markup;
  options.tokenizer.remove_stop_words = o.stop_words;
  return options;
}

FeatureConfig feature_config(const Options& o) {
  FeatureConfig f;
  f.idf_numerator = parse_idf_numerator(o.idf_numerator);
  f.log_base = parse_log_base(o.log_base);
  f.intersection_semantics = parse_intersection_semantics(o.intersection_semantics);
  return f;
}

ModelConfig model_config(const Options& o) {
  ModelConfig config;
  config.alpha = o.alpha;
  config.lambda = o.lambda;
  config.laplace_denominator = parse_laplace_denominator(o.laplace_denominator);
  config.features = feature_config(o);
  config.validate();
  return config;
}

// Writes to --output when given, otherwise to `out`.
template <typename Fn>
void emit(const Options& o, std::ostream& out, Fn&& write) {
  if (o.output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw FormatError("cannot write " + o.output);
  write(file);
}

int report_failures(const std::vector<TaskFailure>& failures,
                    std::size_t loaded, std::ostream& err) {
  for (const auto& failure : failures) {
    err << "warning: skipped " << failure.location << ": " << failure.message
        << '\n';
  }
  if (loaded == 0) {
    err << "error: no task could be loaded\n";
    return kExitIntegrity;
  }
  return failures.empty() ? kExitOk : kExitPartial;
}

// Turns the --config JSON object into "--key=value" tokens placed right after
// the subcommand, so explicit flags (which come later) win. Keys whose
// environment variable is set are skipped so the variable wins too.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw FormatError("cannot read config file " + path);
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!config.is_object()) throw FormatError(path + ": expected a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : config.items()) {
    if (std::getenv(env_name(key).c_str()) != nullptr) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back("--" + key);
    } else if (value.is_string()) {
      injected.push_back("--" + key + "=" + value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ',';
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      injected.push_back("--" + key + "=" + joined);
    } else {
      injected.push_back("--" + key + "=" + value.dump());
    }
  }
  // args[0] is the program, args[1] the subcommand.
  const std::size_t at = std::min<std::size_t>(2, args.size());
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(),
              injected.end());
  return args;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"namesift: bootstrapped person-name disambiguation of web search results"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check corpus integrity");
  validate->add_option("root", o.corpus, "Corpus root")->required();
  keyed_flag(validate, "strip_markup", o.strip_markup, "Strip HTML from bodies");

  auto* classify = app.add_subcommand("classify", "Map documents with one model");
  add_common(classify, o);
  add_model_params(classify, o);
  keyed(classify, "model", o.model,
        "cosine|score|score_smoothed|nb_bernoulli|nb_multinomial");
  keyed(classify, "noise", o.noise, "none|union|intersection")->required();
  keyed(classify, "assignments", o.assignments,
        "Directory for per-task assignment TSV files");
  keyed(classify, "scores_json", o.scores_json,
        "Directory for per-task full score matrices (JSON)");

  auto* cluster = app.add_subcommand("cluster", "Run a clustering baseline");
  add_common(cluster, o);
  add_features(cluster, o);
  add_kmeans_params(cluster, o);
  keyed(cluster, "method", o.method, "hac|kmeans")
      ->check(CLI::IsMember({"hac", "kmeans"}));
  keyed(cluster, "clusters", o.clusters, "Write clusterings as JSON to this file");

  auto* grid = app.add_subcommand("grid", "Run the model x noise grid and baselines");
  add_common(grid, o);
  add_model_params(grid, o);
  add_kmeans_params(grid, o);
  keyed(grid, "models", o.models, "Comma-separated models");
  keyed(grid, "noise", o.noise, "Comma-separated noise modes")
      ->default_str("none,union,intersection");
  keyed_flag(grid, "hac", o.hac, "Add the HAC complete-link baseline");
  keyed_flag(grid, "kmeans", o.kmeans, "Add the K-Means baseline");

  auto* report = app.add_subcommand("report", "Evaluate stored assignment files");
  add_common(report, o);
  keyed(report, "assignments", o.assignments,
        "Directory with <task>.tsv assignment files")->required();
  keyed(report, "label", o.label, "Model name to print in the report");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<char*> expanded;
  for (auto& a : args) expanded.push_back(a.data());
  try {
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      const ValidationReport result = validate_corpus(o.corpus, load_options(o));
      for (const auto& entry : result.entries) {
        out << (entry.passed ? "PASS" : "FAIL") << '\t' << entry.location << '\t'
            << entry.diagnostic << '\n';
      }
      return result.all_passed() ? kExitOk : kExitIntegrity;
    }

    const auto filter = split_list(o.tasks);
    const OutputFormat format = parse_output_format(o.format);

    if (*grid) {
      RunSpec spec;
      spec.corpus_root = o.corpus;
      spec.tasks = filter;
      for (const auto& m : split_list(o.models)) spec.models.push_back(parse_model(m));
      const std::string noise = o.noise.empty() ? "none,union,intersection" : o.noise;
      for (const auto& n : split_list(noise)) {
        spec.noise_modes.push_back(parse_noise_mode(n));
      }
      if (spec.models.empty()) spec.noise_modes.clear();
      spec.hac = o.hac;
      spec.kmeans = o.kmeans;
      spec.reps = o.reps;
      spec.kmeans_options.max_iterations = o.max_iterations;
      spec.format = format;
      spec.base = model_config(o);
      spec.load = load_options(o);
      spec.jobs = o.jobs;
      const GridResult result = run_grid(spec);
      emit(o, out, [&](std::ostream& s) { write_reports(result.reports, format, s); });
      if (result.floored_events > 0) {
        err << "note: " << result.floored_events
            << " probabilities were floored at 1e-300\n";
      }
      return report_failures(result.failures, result.tasks_loaded, err);
    }

    LoadedCorpus corpus = load_corpus(o.corpus, filter, load_options(o), o.jobs);
    std::vector<EvalReport> reports;

    if (*classify) {
      ModelConfig config = model_config(o);
      config.model = parse_model(o.model);
      config.features.noise = parse_noise_mode(o.noise);
      std::map<std::string, Assignment> assignments;
      reports.push_back(run_classification(corpus.tasks, config, o.jobs, &assignments));
      if (!o.assignments.empty()) fs::create_directories(o.assignments);
      if (!o.scores_json.empty()) fs::create_directories(o.scores_json);
      for (const auto& [name, assignment] : assignments) {
        if (!o.assignments.empty()) {
          std::ofstream file(fs::path(o.assignments) / (file_stem(name) + ".tsv"),
                             std::ios::binary);
          write_assignment_tsv(assignment, file);
        }
        if (!o.scores_json.empty()) {
          std::ofstream file(fs::path(o.scores_json) / (file_stem(name) + ".json"),
                             std::ios::binary);
          write_assignment_json(assignment, file);
        }
      }
    } else if (*cluster) {
      const ClusteringMethod method = o.method == "kmeans"
                                          ? ClusteringMethod::kKMeans
                                          : ClusteringMethod::kHacComplete;
      KMeansOptions kmeans_options;
      kmeans_options.max_iterations = o.max_iterations;
      std::map<std::string, std::vector<Clustering>> clusterings;
      reports.push_back(run_clustering(corpus.tasks, method, o.reps,
                                       feature_config(o), kmeans_options, o.jobs,
                                       &clusterings));
      if (!o.clusters.empty()) {
        nlohmann::ordered_json doc = nlohmann::ordered_json::object();
        for (const auto& [name, runs] : clusterings) {
          std::ostringstream buffer;
          write_clustering_json(runs, buffer);
          doc[name] = nlohmann::ordered_json::parse(buffer.str());
        }
        std::ofstream file(o.clusters, std::ios::binary);
        file << doc.dump(2) << '\n';
      }
    } else if (*report) {
      EvalReport result;
      result.model = o.label;
      result.noise = "-";
      result.config = {{"assignments", o.assignments}};
      for (const auto& task : corpus.tasks) {
        const fs::path file = fs::path(o.assignments) / (file_stem(task.name) + ".tsv");
        std::ifstream in(file);
        if (!in) {
          corpus.failures.push_back({file.string(), "missing assignment file"});
          continue;
        }
        try {
          result.per_task.push_back(evaluate_assignment(task, read_assignment_tsv(in)));
        } catch (const std::exception& e) {
          corpus.failures.push_back({file.string(), e.what()});
        }
      }
      result.aggregate = aggregate(result.per_task);
      reports.push_back(std::move(result));
    }

    emit(o, out, [&](std::ostream& s) { write_reports(reports, format, s); });
    return report_failures(corpus.failures, corpus.tasks.size(), err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const IntegrityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIntegrity;
  }
}

}  // namespace namesift::cli
