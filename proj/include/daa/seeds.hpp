#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace daa {

class Vocabulary;

// Topic label -> glob patterns, in file order. A pattern is a literal term with
// an optional trailing '*'; words of a multi-word pattern are separated by
// spaces.
struct SeedDictionary {
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;

  int size() const { return static_cast<int>(entries.size()); }
  std::vector<std::string> labels() const;
  bool operator==(const SeedDictionary&) const = default;
};

struct SeedAssignment {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> topic_words;  // sorted vocabulary ids per topic

  int n_seeded() const { return static_cast<int>(topic_words.size()); }
};

// "[Label]" sections followed by one pattern per line; '#' starts a comment.
SeedDictionary parse_seed_dictionary(std::string_view text, const std::string& source = "<seeds>");
// JSON object of label -> [patterns], key order preserved.
SeedDictionary parse_seed_dictionary_json(std::string_view text, const std::string& source = "<seeds>");
// Picks the format from the extension (.json) or falls back to sections.
SeedDictionary load_seed_dictionary(const std::filesystem::path& path);
std::string format_seed_dictionary(const SeedDictionary& dictionary);

// `*` at the end means prefix match; otherwise exact. Spaces in the pattern
// stand for the '_' joiner of compounded tokens.
bool pattern_matches(std::string_view pattern, std::string_view term);

// Topics with no matching term produce a warning and an empty set.
SeedAssignment match_seeds(const Vocabulary& vocabulary, const SeedDictionary& dictionary);

}  // namespace daa
