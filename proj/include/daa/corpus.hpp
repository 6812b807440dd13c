#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "daa/seeds.hpp"

namespace daa {

class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws Error on duplicate terms.
  explicit Vocabulary(std::vector<std::string> terms);

  // Id of `term`, inserting it at the end when absent.
  int add(std::string_view term);
  std::optional<int> find(std::string_view term) const;

  const std::string& term(int id) const { return terms_[static_cast<std::size_t>(id)]; }
  const std::vector<std::string>& terms() const { return terms_; }
  int size() const { return static_cast<int>(terms_.size()); }

  bool operator==(const Vocabulary& other) const { return terms_ == other.terms_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, int> index_;
};

struct Document {
  std::string id;
  std::vector<int> word_ids;
  std::optional<std::string> parent_id;
  int seq_index = 0;
  std::optional<std::string> label;
  std::map<std::string, std::string> metadata;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  std::int64_t total_tokens = 0;

  int num_documents() const { return static_cast<int>(documents.size()); }
};

// A document before vocabulary construction: tokens are final strings.
struct RawDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> parent_id;
  std::optional<std::string> label;
  std::map<std::string, std::string> metadata;
};

struct PreprocessOptions {
  bool lowercase = true;
  std::unordered_set<std::string> stopwords;
};

// Everything needed to turn raw records into model vocabulary ids. Saved with
// the model so prediction preprocesses test text the same way.
struct Preprocessing {
  PreprocessOptions options;
  SeedDictionary dictionary;  // supplies the multi-word expressions
  int min_count = 10;
};

// Splits on anything that is not a letter, digit, or non-ASCII byte; keeps
// '-', '_' and '\'' inside words. Drops tokens without letters (numbers,
// punctuation) and stop-words. Lowercasing is ASCII-only.
std::vector<std::string> tokenize(std::string_view text, const PreprocessOptions& options);

// Applies lowercasing, number/punctuation removal and stop-words to tokens
// that arrive pre-split.
std::vector<std::string> normalize_tokens(std::span<const std::string> tokens,
                                          const PreprocessOptions& options);

// Naive segmentation on '.', '?' or '!' followed by whitespace.
std::vector<std::string> split_sentences(std::string_view text);

// Joins consecutive tokens that match a multi-word seed pattern with '_'.
// Greedy, longest pattern first, left to right.
class Compounder {
 public:
  explicit Compounder(const SeedDictionary& dictionary);
  std::vector<std::string> apply(std::span<const std::string> tokens) const;
  bool empty() const { return patterns_.empty(); }

 private:
  std::vector<std::vector<std::string>> patterns_;  // longest first
};

std::vector<std::string> compound_multiwords(std::span<const std::string> tokens,
                                             const SeedDictionary& dictionary);

// Vocabulary = terms with corpus frequency >= min_count, in order of first
// appearance. Documents that end up empty are kept. Throws Error("empty
// corpus") when no token survives.
Corpus build_corpus(std::span<const RawDocument> docs, int min_count);

// Maps tokens into an existing vocabulary, dropping unknown terms.
Corpus map_to_vocabulary(std::span<const RawDocument> docs, const Vocabulary& vocabulary);

// Line-delimited JSON records: id, text | tokens, parent_id, label, meta.
std::vector<RawDocument> read_records(std::istream& in, const Preprocessing& preprocessing,
                                      const std::string& source = "<input>");
std::vector<RawDocument> read_records(const std::filesystem::path& path,
                                      const Preprocessing& preprocessing);

Corpus load_corpus(const std::filesystem::path& path, const Preprocessing& preprocessing);
Corpus load_corpus(const std::filesystem::path& path);  // min_count 1, no stop-words

// Writes records with a `tokens` field. load_corpus reads them back unchanged
// when the vocabulary lists terms in order of first use, as build_corpus does.
void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

// Parent chains in order of first appearance. Each chain lists document indices
// by seq_index; documents without a parent form chains of one.
std::vector<std::vector<int>> document_chains(const Corpus& corpus);

// Index of the preceding sentence in the same parent, or -1.
std::vector<int> predecessors(const Corpus& corpus);

}  // namespace daa
