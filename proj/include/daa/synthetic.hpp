#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "daa/corpus.hpp"
#include "daa/random.hpp"
#include "daa/seeds.hpp"

namespace daa {

// Parameters of the generating process.
struct SyntheticSpec {
  std::vector<std::string> topic_names;
  std::vector<double> proportions;               // dominant-topic frequencies
  std::vector<std::vector<double>> topic_word;   // per topic, over `terms`
  std::vector<std::string> terms;
  // optional background themes over `terms`; each document draws one
  std::vector<std::vector<double>> background;
  double background_weight = 0.0;  // token share drawn from the document's theme
  double focus = 0.8;              // share of non-background tokens from the dominant topic
  // share of documents written only in `vague_word[topic]` (e.g. the topic's
  // slice of a common vocabulary), so only context identifies their topic
  double vague = 0.0;
  std::vector<std::vector<double>> vague_word;
  int num_documents = 1000;
  double mean_length = 12.8;
  int chain_length = 1;
  double persistence = 0.7;  // chance a sentence keeps its predecessor's topic
  int first_year = 0;        // when num_years > 0, chains get meta "year"
  int num_years = 0;
};

struct SyntheticCorpus {
  Corpus corpus;  // vocabulary = spec.terms, in order
  std::vector<std::string> gold;  // dominant topic name per document
  std::vector<int> gold_topic;
};

// Throws Error when proportions or distributions are invalid.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, Rng& rng);

// A topic world for experiments: each topic owns `words_per_topic` Zipf-weighted
// terms, `shared_words` terms are shared by pairs of topics, and
// `background_themes` distributions of `background_words` generic terms each.
struct WorldOptions {
  std::vector<std::string> topic_names;
  std::vector<double> proportions;
  int words_per_topic = 60;
  int shared_words = 0;
  double shared_weight = 0.0;  // probability mass each topic puts on shared terms
  int background_words = 0;  // per theme
  int background_themes = 1;
  double background_weight = 0.0;
  double focus = 0.8;
  double vague = 0.0;  // needs shared_words > 0
  double zipf_exponent = 1.0;
  double leak = 0.0;  // mass each topic spreads evenly over the other topics' own terms
  int num_documents = 1000;
  double mean_length = 12.8;
  int chain_length = 1;
  double persistence = 0.7;
};

SyntheticSpec make_world(const WorldOptions& options);

// The `per_topic` most probable own terms of every topic, as exact patterns.
SeedDictionary seed_dictionary_for(const SyntheticSpec& spec, int per_topic);

}  // namespace daa
