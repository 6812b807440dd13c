#pragma once

#include <unistd.h>

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "daa/corpus.hpp"
#include "daa/log.hpp"

namespace daa::test {

// Corpus from word-id lists over a vocabulary of `v` terms named w0, w1, ...
inline Corpus make_corpus(const std::vector<std::vector<int>>& docs, int v,
                          const std::vector<std::string>& parents = {}) {
  std::vector<std::string> terms;
  for (int i = 0; i < v; ++i) terms.push_back("w" + std::to_string(i));
  Corpus c;
  c.vocabulary = Vocabulary(terms);
  std::map<std::string, int> next_seq;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    Document doc;
    doc.id = "d" + std::to_string(d);
    doc.word_ids = docs[d];
    if (d < parents.size() && !parents[d].empty()) {
      doc.parent_id = parents[d];
      doc.seq_index = next_seq[parents[d]]++;
    }
    c.total_tokens += static_cast<std::int64_t>(docs[d].size());
    c.documents.push_back(std::move(doc));
  }
  return c;
}

// Random corpus: `d` documents of 1..max_len tokens over `v` words, grouped in
// chains of `chain` sentences.
inline Corpus random_corpus(std::uint64_t seed, int d, int v, int max_len, int chain = 1) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> docs;
  std::vector<std::string> parents;
  for (int i = 0; i < d; ++i) {
    const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_len));
    std::vector<int> words;
    for (int j = 0; j < len; ++j) words.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(v)));
    docs.push_back(std::move(words));
    parents.push_back(chain > 1 ? "p" + std::to_string(i / chain) : "");
  }
  return make_corpus(docs, v, parents);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("daa-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Collects warnings for the lifetime of the object.
class CaptureWarnings {
 public:
  CaptureWarnings() {
    previous_ = set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~CaptureWarnings() { set_warning_sink(previous_); }
  std::vector<std::string> messages;

 private:
  WarningSink previous_;
};

}  // namespace daa::test
