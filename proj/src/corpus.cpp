#include "daa/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "daa/error.hpp"

namespace daa {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80 || c == '_'; }
bool is_joiner(unsigned char c) { return c == '-' || c == '\''; }
bool is_letter_byte(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }

bool has_letter(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](char c) { return is_letter_byte(static_cast<unsigned char>(c)); });
}

void lowercase_ascii(std::string& s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
}

// Keeps the token if it passes the number/punctuation and stop-word filters.
bool accept(std::string& token, const PreprocessOptions& options) {
  if (options.lowercase) lowercase_ascii(token);
  if (token.empty() || !has_letter(token)) return false;
  return !options.stopwords.contains(token);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<int>(i)).second) {
      throw Error("duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

int Vocabulary::add(std::string_view term) {
  auto it = index_.find(std::string(term));
  if (it != index_.end()) return it->second;
  const int id = size();
  terms_.emplace_back(term);
  index_.emplace(terms_.back(), id);
  return id;
}

std::optional<int> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessOptions& options) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n) {
      const auto c = static_cast<unsigned char>(text[j]);
      if (is_word_byte(c)) {
        ++j;
      } else if (is_joiner(c) && j + 1 < n && is_word_byte(static_cast<unsigned char>(text[j + 1]))) {
        j += 2;
      } else {
        break;
      }
    }
    std::string token(text.substr(i, j - i));
    if (accept(token, options)) out.push_back(std::move(token));
    i = j;
  }
  return out;
}

std::vector<std::string> normalize_tokens(std::span<const std::string> tokens,
                                          const PreprocessOptions& options) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::string token = t;
    if (accept(token, options)) out.push_back(std::move(token));
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto push = [&](std::size_t end) {
    auto piece = text.substr(start, end - start);
    const auto first = piece.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return;
    const auto last = piece.find_last_not_of(" \t\r\n");
    out.emplace_back(piece.substr(first, last - first + 1));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '?' || c == '!') && i + 1 < text.size() &&
        std::isspace(static_cast<unsigned char>(text[i + 1]))) {
      push(i + 1);
      start = i + 1;
    }
  }
  push(text.size());
  return out;
}

Compounder::Compounder(const SeedDictionary& dictionary) {
  for (const auto& [label, patterns] : dictionary.entries) {
    for (const auto& pattern : patterns) {
      std::vector<std::string> words;
      std::istringstream in(pattern);
      for (std::string w; in >> w;) {
        lowercase_ascii(w);
        words.push_back(std::move(w));
      }
      if (words.size() > 1 && std::find(patterns_.begin(), patterns_.end(), words) == patterns_.end()) {
        patterns_.push_back(std::move(words));
      }
    }
  }
  std::stable_sort(patterns_.begin(), patterns_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::vector<std::string> Compounder::apply(std::span<const std::string> tokens) const {
  if (patterns_.empty()) return {tokens.begin(), tokens.end()};
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (const auto& words : patterns_) {
      if (i + words.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t w = 0; w < words.size() && ok; ++w) {
        ok = pattern_matches(words[w], tokens[i + w]);
      }
      if (ok) {
        matched = words.size();
        break;
      }
    }
    if (matched == 0) {
      out.push_back(tokens[i]);
      ++i;
      continue;
    }
    std::string joined = tokens[i];
    for (std::size_t w = 1; w < matched; ++w) joined += "_" + tokens[i + w];
    out.push_back(std::move(joined));
    i += matched;
  }
  return out;
}

std::vector<std::string> compound_multiwords(std::span<const std::string> tokens,
                                             const SeedDictionary& dictionary) {
  return Compounder(dictionary).apply(tokens);
}

namespace {

// Shared by build_corpus and map_to_vocabulary: copies document fields and
// assigns seq_index by input order within each parent.
Corpus assemble(std::span<const RawDocument> docs, Vocabulary vocabulary,
                const std::function<std::optional<int>(const std::string&)>& lookup) {
  Corpus corpus;
  corpus.vocabulary = std::move(vocabulary);
  corpus.documents.reserve(docs.size());
  std::unordered_map<std::string, int> next_seq;
  for (const auto& raw : docs) {
    Document doc;
    doc.id = raw.id;
    doc.parent_id = raw.parent_id;
    doc.label = raw.label;
    doc.metadata = raw.metadata;
    if (raw.parent_id) doc.seq_index = next_seq[*raw.parent_id]++;
    doc.word_ids.reserve(raw.tokens.size());
    for (const auto& t : raw.tokens) {
      if (auto id = lookup(t)) doc.word_ids.push_back(*id);
    }
    corpus.total_tokens += static_cast<std::int64_t>(doc.word_ids.size());
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace

Corpus build_corpus(std::span<const RawDocument> docs, int min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) ++freq[t];
  }
  Vocabulary vocabulary;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) {
      if (freq[t] >= min_count) vocabulary.add(t);
    }
  }
  const Vocabulary& v = vocabulary;
  Corpus corpus = assemble(docs, vocabulary, [&v](const std::string& t) { return v.find(t); });
  if (corpus.total_tokens == 0) throw Error("empty corpus");
  return corpus;
}

Corpus map_to_vocabulary(std::span<const RawDocument> docs, const Vocabulary& vocabulary) {
  return assemble(docs, vocabulary, [&vocabulary](const std::string& t) { return vocabulary.find(t); });
}

std::vector<RawDocument> read_records(std::istream& in, const Preprocessing& preprocessing,
                                      const std::string& source) {
  using nlohmann::json;
  const Compounder compounder(preprocessing.dictionary);
  std::vector<RawDocument> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source, line_no, "record is not an object");
    auto string_field = [&](const char* name) -> std::optional<std::string> {
      auto it = record.find(name);
      if (it == record.end() || it->is_null()) return std::nullopt;
      if (!it->is_string()) throw ParseError(source, line_no, std::string("field '") + name + "' must be a string");
      return it->get<std::string>();
    };

    RawDocument doc;
    auto id = string_field("id");
    if (!id) throw ParseError(source, line_no, "missing required field 'id'");
    doc.id = std::move(*id);
    doc.parent_id = string_field("parent_id");
    doc.label = string_field("label");

    const bool has_text = record.contains("text") && !record["text"].is_null();
    const bool has_tokens = record.contains("tokens") && !record["tokens"].is_null();
    if (has_text == has_tokens) {
      throw ParseError(source, line_no, "exactly one of 'text' or 'tokens' is required");
    }
    std::vector<std::string> tokens;
    if (has_text) {
      tokens = tokenize(*string_field("text"), preprocessing.options);
    } else {
      const auto& arr = record["tokens"];
      if (!arr.is_array()) throw ParseError(source, line_no, "field 'tokens' must be an array");
      std::vector<std::string> raw;
      raw.reserve(arr.size());
      for (const auto& t : arr) {
        if (!t.is_string()) throw ParseError(source, line_no, "tokens must be strings");
        raw.push_back(t.get<std::string>());
      }
      tokens = normalize_tokens(raw, preprocessing.options);
    }
    doc.tokens = compounder.apply(tokens);

    if (auto it = record.find("meta"); it != record.end() && !it->is_null()) {
      if (!it->is_object()) throw ParseError(source, line_no, "field 'meta' must be an object");
      for (const auto& [key, value] : it->items()) {
        if (value.is_string()) {
          doc.metadata[key] = value.get<std::string>();
        } else if (value.is_number() || value.is_boolean()) {
          doc.metadata[key] = value.dump();
        } else {
          throw ParseError(source, line_no, "meta value '" + key + "' must be a string");
        }
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> read_records(const std::filesystem::path& path,
                                      const Preprocessing& preprocessing) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_records(in, preprocessing, path.string());
}

Corpus load_corpus(const std::filesystem::path& path, const Preprocessing& preprocessing) {
  const auto docs = read_records(path, preprocessing);
  return build_corpus(docs, preprocessing.min_count);
}

Corpus load_corpus(const std::filesystem::path& path) {
  Preprocessing p;
  p.min_count = 1;
  return load_corpus(path, p);
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  using nlohmann::json;
  for (const auto& doc : corpus.documents) {
    json record;
    record["id"] = doc.id;
    json tokens = json::array();
    for (int w : doc.word_ids) tokens.push_back(corpus.vocabulary.term(w));
    record["tokens"] = std::move(tokens);
    if (doc.parent_id) record["parent_id"] = *doc.parent_id;
    if (doc.label) record["label"] = *doc.label;
    if (!doc.metadata.empty()) record["meta"] = doc.metadata;
    out << record.dump() << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  save_corpus(corpus, out);
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::unordered_set<std::string> words;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string w = line.substr(first, last - first + 1);
    lowercase_ascii(w);
    words.insert(std::move(w));
  }
  return words;
}

std::vector<std::vector<int>> document_chains(const Corpus& corpus) {
  std::vector<std::vector<int>> chains;
  std::unordered_map<std::string, std::size_t> chain_of;
  for (int d = 0; d < corpus.num_documents(); ++d) {
    const auto& doc = corpus.documents[d];
    if (!doc.parent_id) {
      chains.push_back({d});
      continue;
    }
    auto [it, inserted] = chain_of.emplace(*doc.parent_id, chains.size());
    if (inserted) chains.emplace_back();
    chains[it->second].push_back(d);
  }
  for (auto& chain : chains) {
    std::stable_sort(chain.begin(), chain.end(), [&](int a, int b) {
      return corpus.documents[a].seq_index < corpus.documents[b].seq_index;
    });
  }
  return chains;
}

std::vector<int> predecessors(const Corpus& corpus) {
  std::vector<int> prev(corpus.documents.size(), -1);
  for (const auto& chain : document_chains(corpus)) {
    for (std::size_t i = 1; i < chain.size(); ++i) prev[chain[i]] = chain[i - 1];
  }
  return prev;
}

}  // namespace daa
