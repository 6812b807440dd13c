#include "daa/seeds.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "daa/corpus.hpp"
#include "daa/error.hpp"
#include "daa/log.hpp"

namespace daa {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string normalize_pattern(std::string pattern) {
  for (char& c : pattern) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  // collapse internal whitespace runs to one space
  std::istringstream in(pattern);
  std::string out;
  for (std::string w; in >> w;) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void add_entry(SeedDictionary& dict, std::string label, std::vector<std::string> patterns,
               const std::string& source, int line) {
  if (label.empty()) throw ParseError(source, line, "empty topic label");
  if (patterns.empty()) throw ParseError(source, line, "topic '" + label + "' has no patterns");
  for (const auto& [existing, unused] : dict.entries) {
    if (existing == label) throw ParseError(source, line, "duplicate topic label '" + label + "'");
  }
  dict.entries.emplace_back(std::move(label), std::move(patterns));
}

}  // namespace

std::vector<std::string> SeedDictionary::labels() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.first);
  return out;
}

SeedDictionary parse_seed_dictionary(std::string_view text, const std::string& source) {
  SeedDictionary dict;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool open = false;
  std::string label;
  std::vector<std::string> patterns;
  int label_line = 0;
  auto close = [&]() {
    if (open) add_entry(dict, std::move(label), std::move(patterns), source, label_line);
    patterns.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(source, line_no, "unterminated section header");
      close();
      label = trim(std::string_view(t).substr(1, t.size() - 2));
      label_line = line_no;
      open = true;
      continue;
    }
    if (!open) throw ParseError(source, line_no, "pattern outside of a [Topic] section");
    std::string p = normalize_pattern(t);
    if (p == "*") throw ParseError(source, line_no, "pattern matches every term");
    patterns.push_back(std::move(p));
  }
  close();
  return dict;
}

SeedDictionary parse_seed_dictionary_json(std::string_view text, const std::string& source) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(source, 0, "seed dictionary must be an object");
  SeedDictionary dict;
  for (const auto& [label, value] : doc.items()) {
    std::vector<std::string> patterns;
    if (value.is_string()) {
      patterns.push_back(normalize_pattern(value.get<std::string>()));
    } else if (value.is_array()) {
      for (const auto& p : value) {
        if (!p.is_string()) throw ParseError(source, 0, "patterns of '" + label + "' must be strings");
        auto n = normalize_pattern(p.get<std::string>());
        if (n.empty()) throw ParseError(source, 0, "empty pattern in '" + label + "'");
        patterns.push_back(std::move(n));
      }
    } else {
      throw ParseError(source, 0, "patterns of '" + label + "' must be a list");
    }
    add_entry(dict, label, std::move(patterns), source, 0);
  }
  return dict;
}

SeedDictionary load_seed_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() == ".json") return parse_seed_dictionary_json(buffer.str(), path.string());
  return parse_seed_dictionary(buffer.str(), path.string());
}

std::string format_seed_dictionary(const SeedDictionary& dictionary) {
  std::string out;
  for (const auto& [label, patterns] : dictionary.entries) {
    out += "[" + label + "]\n";
    for (const auto& p : patterns) out += p + "\n";
  }
  return out;
}

bool pattern_matches(std::string_view pattern, std::string_view term) {
  const bool prefix = !pattern.empty() && pattern.back() == '*';
  if (prefix) pattern.remove_suffix(1);
  if (prefix ? term.size() < pattern.size() : term.size() != pattern.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char p = pattern[i] == ' ' ? '_' : pattern[i];
    if (p != term[i]) return false;
  }
  return true;
}

SeedAssignment match_seeds(const Vocabulary& vocabulary, const SeedDictionary& dictionary) {
  SeedAssignment out;
  out.labels = dictionary.labels();
  out.topic_words.resize(dictionary.entries.size());
  for (std::size_t k = 0; k < dictionary.entries.size(); ++k) {
    const auto& patterns = dictionary.entries[k].second;
    auto& words = out.topic_words[k];
    for (int v = 0; v < vocabulary.size(); ++v) {
      const auto& term = vocabulary.term(v);
      if (std::any_of(patterns.begin(), patterns.end(),
                      [&](const std::string& p) { return pattern_matches(p, term); })) {
        words.push_back(v);
      }
    }
    if (words.empty()) {
      warn("seed topic '" + dictionary.entries[k].first + "' matches no vocabulary term");
    }
  }
  return out;
}

}  // namespace daa
