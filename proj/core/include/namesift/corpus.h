#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace namesift {

// Gold label used for documents that describe none of the task's entities.
inline constexpr std::string_view kNoiseLabel = "__NOISE__";

// One knowledge-base article about one individual.
struct EntityProfile {
  std::string id;
  std::string title;
  std::string text;
  std::vector<std::string> tokens;

  bool operator==(const EntityProfile&) const = default;
};

// One web search result. `url` and `rank` are informational only.
struct ResultDocument {
  std::string id;
  std::string url;
  int rank = 1;
  std::string text;
  std::vector<std::string> tokens;

  // |d|, the total token count.
  std::size_t length() const { return tokens.size(); }

  bool operator==(const ResultDocument&) const = default;
};

// document id -> entity id or kNoiseLabel.
struct GoldAlignment {
  std::map<std::string, std::string> labels;

  bool operator==(const GoldAlignment&) const = default;
};

// One ambiguous name: its entity profiles, result documents and gold labels.
struct Task {
  std::string name;
  std::vector<EntityProfile> entities;
  std::vector<ResultDocument> documents;
  GoldAlignment gold;

  bool operator==(const Task&) const = default;
};

struct TokenizerOptions {
  // Drop tokens found in the built-in English stop-word list.
  bool remove_stop_words = false;
};

// Lowercased word unigrams. Any maximal run of non-alphanumeric characters
// separates tokens; digits are alphanumeric. UTF-8 letters outside ASCII are
// kept as word characters and lowercased for the Latin, Greek and Cyrillic
// blocks.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options = {});

bool is_stop_word(std::string_view token);

// Removes tags (and the bodies of <script>/<style>) and decodes character
// entities. Whitespace introduced by removed tags is a single space.
std::string strip_markup(std::string_view html);

// freq(f, c) for every distinct token.
std::map<std::string, std::size_t> term_frequencies(
    std::span<const std::string> tokens);

// Checks unique ids and that every document has exactly one gold label
// pointing at a known entity or the noise label. Throws IntegrityError.
void validate_task(const Task& task);

struct LoadOptions {
  TokenizerOptions tokenizer;
  // Strip markup from every body regardless of the manifest's "format".
  bool strip_markup = false;
};

// Reads task.json, the referenced body files, and gold.tsv from `dir`.
// Throws FormatError for a missing or malformed manifest/gold file and
// IntegrityError for id or label violations.
Task load_task(const std::filesystem::path& dir,
               const LoadOptions& options = {});

// Writes `task` in the directory format understood by load_task. Bodies go
// to entities/<n>.txt and documents/<n>.txt.
void write_task(const Task& task, const std::filesystem::path& dir);

// Builds a Task from raw texts, tokenizing each body. Convenience for tests
// and in-memory pipelines; validates the result.
Task make_task(std::string name,
               std::vector<EntityProfile> entities,
               std::vector<ResultDocument> documents,
               GoldAlignment gold,
               const TokenizerOptions& options = {});

}  // namespace namesift
