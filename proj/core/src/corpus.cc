#include "namesift/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "namesift/errors.h"

namespace namesift {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Decodes one UTF-8 sequence starting at text[pos]. Returns the code point
// and advances pos; malformed input yields U+FFFD and consumes one byte.
char32_t next_code_point(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  std::size_t length = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    length = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    length = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    length = 4;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + length > text.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (std::size_t i = 1; i < length; ++i) {
    const auto cont = static_cast<unsigned char>(text[pos + i]);
    if ((cont & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  pos += length;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9');
  }
  if (cp <= 0xBF) return false;  // C1 controls, Latin-1 punctuation/symbols
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp >= 0xFF1A && cp <= 0xFF20) return false;
  if (cp >= 0xFF3B && cp <= 0xFF40) return false;
  if (cp >= 0xFF5B && cp <= 0xFF65) return false;
  if (cp == 0xFEFF || cp == 0xFFFD) return false;
  return true;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
      return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x131 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

constexpr std::string_view kStopWords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",
    "am",      "an",      "and",    "any",     "are",     "as",      "at",
    "be",      "because", "been",   "before",  "being",   "below",   "between",
    "both",    "but",     "by",     "can",     "could",   "did",     "do",
    "does",    "doing",   "down",   "during",  "each",    "few",     "for",
    "from",    "further", "had",    "has",     "have",    "having",  "he",
    "her",     "here",    "hers",   "herself", "him",     "himself", "his",
    "how",     "i",       "if",     "in",      "into",    "is",      "it",
    "its",     "itself",  "just",   "me",      "more",    "most",    "my",
    "myself",  "no",      "nor",    "not",     "now",     "of",      "off",
    "on",      "once",    "only",   "or",      "other",   "our",     "ours",
    "ourselves", "out",   "over",   "own",     "same",    "she",     "should",
    "so",      "some",    "such",   "than",    "that",    "the",     "their",
    "theirs",  "them",    "themselves", "then", "there",  "these",   "they",
    "this",    "those",   "through", "to",     "too",     "under",   "until",
    "up",      "very",    "was",    "we",      "were",    "what",    "when",
    "where",   "which",   "while",  "who",     "whom",    "why",     "will",
    "with",    "would",   "you",    "your",    "yours",   "yourself",
    "yourselves"};
static_assert(std::ranges::is_sorted(kStopWords));

bool iequals_ascii(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

// Named entities for U+00C0..U+00FF, in code point order.
constexpr std::string_view kLatin1Entities[] = {
    "Agrave", "Aacute", "Acirc",  "Atilde", "Auml",   "Aring",  "AElig",  "Ccedil",
    "Egrave", "Eacute", "Ecirc",  "Euml",   "Igrave", "Iacute", "Icirc",  "Iuml",
    "ETH",    "Ntilde", "Ograve", "Oacute", "Ocirc",  "Otilde", "Ouml",   "times",
    "Oslash", "Ugrave", "Uacute", "Ucirc",  "Uuml",   "Yacute", "THORN",  "szlig",
    "agrave", "aacute", "acirc",  "atilde", "auml",   "aring",  "aelig",  "ccedil",
    "egrave", "eacute", "ecirc",  "euml",   "igrave", "iacute", "icirc",  "iuml",
    "eth",    "ntilde", "ograve", "oacute", "ocirc",  "otilde", "ouml",   "divide",
    "oslash", "ugrave", "uacute", "ucirc",  "uuml",   "yacute", "thorn",  "yuml"};

// Decodes the entity starting at text[pos] == '&'. Returns false when the
// sequence is not a recognised entity.
bool decode_entity(std::string_view text, std::size_t& pos, std::string& out) {
  const std::size_t end = text.find(';', pos);
  if (end == std::string_view::npos || end - pos > 10) return false;
  const std::string_view name = text.substr(pos + 1, end - pos - 1);
  if (name.empty()) return false;
  char32_t cp = 0;
  if (name[0] == '#') {
    std::string_view digits = name.substr(1);
    int base = 10;
    if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
      base = 16;
      digits.remove_prefix(1);
    }
    if (digits.empty()) return false;
    for (char ch : digits) {
      int v = 0;
      if (ch >= '0' && ch <= '9') {
        v = ch - '0';
      } else if (base == 16 && ch >= 'a' && ch <= 'f') {
        v = ch - 'a' + 10;
      } else if (base == 16 && ch >= 'A' && ch <= 'F') {
        v = ch - 'A' + 10;
      } else {
        return false;
      }
      cp = cp * base + v;
      if (cp > 0x10FFFF) return false;
    }
  } else if (name == "amp") {
    cp = '&';
  } else if (name == "lt") {
    cp = '<';
  } else if (name == "gt") {
    cp = '>';
  } else if (name == "quot") {
    cp = '"';
  } else if (name == "apos") {
    cp = '\'';
  } else if (name == "nbsp") {
    cp = ' ';
  } else if (const auto* it = std::ranges::find(kLatin1Entities, name);
             it != std::end(kLatin1Entities)) {
    cp = 0xC0 + static_cast<char32_t>(it - std::begin(kLatin1Entities));
  } else {
    return false;
  }
  append_utf8(out, cp);
  pos = end + 1;
  return true;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string required_string(const json& object, const char* key,
                            const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end() || !it->is_string()) {
    throw FormatError(where + ": missing string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

bool is_html(const json& object, bool fallback) {
  const auto it = object.find("format");
  if (it == object.end()) return fallback;
  if (!it->is_string()) throw FormatError("\"format\" must be a string");
  const auto format = it->get<std::string>();
  if (format == "html") return true;
  if (format == "text") return false;
  throw FormatError("unknown body format \"" + format + "\"");
}

std::string load_body(const fs::path& dir, const json& item, bool html,
                      const std::string& where) {
  const fs::path file = dir / required_string(item, "file", where);
  if (!fs::is_regular_file(file)) {
    throw FormatError(where + ": dangling file reference " + file.string());
  }
  std::string text = read_file(file);
  return html ? strip_markup(text) : text;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

GoldAlignment read_gold(const fs::path& file) {
  if (!fs::is_regular_file(file)) {
    throw FormatError("missing gold: " + file.string());
  }
  std::ifstream in(file);
  GoldAlignment gold;
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string_view line = trim_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos ||
        line.find('\t', tab + 1) != std::string_view::npos) {
      throw FormatError(file.string() + ":" + std::to_string(line_number) +
                        ": expected doc_id<TAB>entity_id");
    }
    std::string doc(line.substr(0, tab));
    std::string label(line.substr(tab + 1));
    if (doc.empty() || label.empty()) {
      throw FormatError(file.string() + ":" + std::to_string(line_number) +
                        ": empty column");
    }
    if (!gold.labels.emplace(std::move(doc), std::move(label)).second) {
      throw IntegrityError(file.string() + ":" + std::to_string(line_number) +
                           ": duplicate gold row for document");
    }
  }
  return gold;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!options.remove_stop_words || !is_stop_word(current)) {
      tokens.push_back(std::move(current));
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    if (is_word_char(cp)) {
      append_utf8(current, to_lower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

bool is_stop_word(std::string_view token) {
  return std::ranges::binary_search(kStopWords, token);
}

std::string strip_markup(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t pos = 0;
  auto skip_past = [&](std::string_view closing) {
    std::size_t end = pos;
    while (end < html.size()) {
      end = html.find('<', end);
      if (end == std::string_view::npos) break;
      if (iequals_ascii(html.substr(end, closing.size()), closing)) break;
      ++end;
    }
    if (end == std::string_view::npos || end >= html.size()) {
      pos = html.size();
      return;
    }
    const std::size_t close = html.find('>', end);
    pos = close == std::string_view::npos ? html.size() : close + 1;
  };
  while (pos < html.size()) {
    const char ch = html[pos];
    if (ch == '<') {
      if (html.substr(pos, 4) == "<!--") {
        const std::size_t end = html.find("-->", pos + 4);
        pos = end == std::string_view::npos ? html.size() : end + 3;
      } else {
        const std::size_t end = html.find('>', pos);
        if (end == std::string_view::npos) {
          pos = html.size();
        } else {
          const std::string_view tag = html.substr(pos, end - pos + 1);
          pos = end + 1;
          if (iequals_ascii(tag.substr(0, 7), "<script")) {
            skip_past("</script");
          } else if (iequals_ascii(tag.substr(0, 6), "<style")) {
            skip_past("</style");
          }
        }
      }
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else if (ch == '&') {
      if (!decode_entity(html, pos, out)) {
        out.push_back('&');
        ++pos;
      }
    } else {
      out.push_back(ch);
      ++pos;
    }
  }
  return out;
}

std::map<std::string, std::size_t> term_frequencies(
    std::span<const std::string> tokens) {
  std::map<std::string, std::size_t> counts;
  for (const auto& token : tokens) ++counts[token];
  return counts;
}

void validate_task(const Task& task) {
  std::set<std::string_view> entity_ids;
  for (const auto& entity : task.entities) {
    if (entity.id.empty()) {
      throw IntegrityError(task.name + ": entity with empty id");
    }
    if (entity.id == kNoiseLabel) {
      throw IntegrityError(task.name + ": entity id collides with " +
                           std::string(kNoiseLabel));
    }
    if (!entity_ids.insert(entity.id).second) {
      throw IntegrityError(task.name + ": duplicate entity id " + entity.id);
    }
  }
  std::set<std::string_view> document_ids;
  for (const auto& document : task.documents) {
    if (document.id.empty()) {
      throw IntegrityError(task.name + ": document with empty id");
    }
    if (!document_ids.insert(document.id).second) {
      throw IntegrityError(task.name + ": duplicate document id " +
                           document.id);
    }
    const auto label = task.gold.labels.find(document.id);
    if (label == task.gold.labels.end()) {
      throw IntegrityError(task.name + ": document " + document.id +
                           " has no gold label");
    }
  }
  for (const auto& [doc, label] : task.gold.labels) {
    if (!document_ids.contains(doc)) {
      throw IntegrityError(task.name + ": gold label for unknown document " +
                           doc);
    }
    if (label != kNoiseLabel && !entity_ids.contains(label)) {
      throw IntegrityError(task.name + ": gold label for document " + doc +
                           " references unknown entity " + label);
    }
  }
}

Task load_task(const fs::path& dir, const LoadOptions& options) {
  const fs::path manifest_path = dir / "task.json";
  if (!fs::is_regular_file(manifest_path)) {
    throw FormatError("missing manifest: " + manifest_path.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.is_object()) {
    throw FormatError(manifest_path.string() + ": expected a JSON object");
  }

  const std::string where = manifest_path.string();
  Task task;
  task.name = required_string(manifest, "name", where);
  const bool html_default = is_html(manifest, options.strip_markup);

  auto list = [&](const char* key) -> const json& {
    static const json kEmpty = json::array();
    const auto it = manifest.find(key);
    if (it == manifest.end()) return kEmpty;
    if (!it->is_array()) throw FormatError(where + ": \"" + key + "\" must be an array");
    return *it;
  };

  for (const auto& item : list("entities")) {
    const std::string item_where = where + " entity";
    EntityProfile entity;
    entity.id = required_string(item, "id", item_where);
    entity.title = item.value("title", std::string());
    entity.text = load_body(dir, item,
                            options.strip_markup || is_html(item, html_default),
                            item_where + " " + entity.id);
    entity.tokens = tokenize(entity.text, options.tokenizer);
    task.entities.push_back(std::move(entity));
  }
  for (const auto& item : list("documents")) {
    const std::string item_where = where + " document";
    ResultDocument document;
    document.id = required_string(item, "id", item_where);
    document.url = item.value("url", std::string());
    document.rank = item.value("rank", 1);
    if (document.rank < 1) {
      throw FormatError(item_where + " " + document.id + ": rank must be >= 1");
    }
    document.text = load_body(dir, item,
                              options.strip_markup || is_html(item, html_default),
                              item_where + " " + document.id);
    document.tokens = tokenize(document.text, options.tokenizer);
    task.documents.push_back(std::move(document));
  }

  task.gold = read_gold(dir / "gold.tsv");
  validate_task(task);
  return task;
}

void write_task(const Task& task, const fs::path& dir) {
  fs::create_directories(dir / "entities");
  fs::create_directories(dir / "documents");
  json manifest;
  manifest["name"] = task.name;
  manifest["entities"] = json::array();
  manifest["documents"] = json::array();
  for (std::size_t i = 0; i < task.entities.size(); ++i) {
    const auto& entity = task.entities[i];
    const std::string file = "entities/e" + std::to_string(i) + ".txt";
    write_file(dir / file, entity.text);
    manifest["entities"].push_back(
        {{"id", entity.id}, {"title", entity.title}, {"file", file}});
  }
  std::ostringstream gold;
  gold << "# doc_id\tentity_id\n";
  for (std::size_t i = 0; i < task.documents.size(); ++i) {
    const auto& document = task.documents[i];
    const std::string file = "documents/d" + std::to_string(i) + ".txt";
    write_file(dir / file, document.text);
    manifest["documents"].push_back({{"id", document.id},
                                     {"url", document.url},
                                     {"rank", document.rank},
                                     {"file", file}});
    const auto label = task.gold.labels.find(document.id);
    if (label != task.gold.labels.end()) {
      gold << document.id << '\t' << label->second << '\n';
    }
  }
  write_file(dir / "task.json", manifest.dump(2) + "\n");
  write_file(dir / "gold.tsv", gold.str());
}

Task make_task(std::string name, std::vector<EntityProfile> entities,
               std::vector<ResultDocument> documents, GoldAlignment gold,
               const TokenizerOptions& options) {
  Task task;
  task.name = std::move(name);
  task.entities = std::move(entities);
  task.documents = std::move(documents);
  task.gold = std::move(gold);
  for (auto& entity : task.entities) {
    entity.tokens = tokenize(entity.text, options);
  }
  for (auto& document : task.documents) {
    document.tokens = tokenize(document.text, options);
  }
  validate_task(task);
  return task;
}

}  // namespace namesift
