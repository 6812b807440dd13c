#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "daa/corpus.hpp"

namespace daa {

struct ModelConfig {
  int num_topics = 0;  // seeded + unseeded
  double alpha = 0.5;
  double beta = 0.1;
  double gamma = 0.0;        // sequential weight
  double nu = 0.0;           // prior adjustment strength
  double seed_weight = 0.01;  // pseudo-count per seeded cell is seed_weight * N / V
  int max_iter = 2000;
  double batch_size = 0.01;
  int workers = 1;
  bool auto_stop = false;
  std::uint64_t rng_seed = 0;
  int predict_iter = 100;

  // Throws ConfigError when a bound is violated.
  void validate(int n_seeded) const;
  bool operator==(const ModelConfig&) const = default;
};

// Integer topic-word assignments, word-major (word * K + topic).
struct TopicWordCounts {
  int num_topics = 0;
  int num_words = 0;
  std::vector<std::int32_t> word_topic;
  std::vector<std::int64_t> topic_total;

  TopicWordCounts() = default;
  TopicWordCounts(int k, int v)
      : num_topics(k),
        num_words(v),
        word_topic(static_cast<std::size_t>(k) * static_cast<std::size_t>(v), 0),
        topic_total(static_cast<std::size_t>(k), 0) {}

  std::int32_t at(int k, int v) const {
    return word_topic[static_cast<std::size_t>(v) * num_topics + k];
  }
  void add(int k, int v, std::int32_t n) {
    word_topic[static_cast<std::size_t>(v) * num_topics + k] += n;
    topic_total[static_cast<std::size_t>(k)] += n;
  }
  bool operator==(const TopicWordCounts&) const = default;
};

// Sampler state. The effective topic-word count N_kv is the integer assignment
// count plus the fixed seed pseudo-count; keeping them apart makes count deltas
// exact.
struct ModelState {
  ModelConfig config;
  Vocabulary vocabulary;
  std::vector<std::string> topic_labels;
  int n_seeded = 0;

  std::vector<std::int64_t> doc_offset;  // D + 1 offsets into z
  std::vector<int> z;
  std::vector<std::int32_t> doc_topic;  // D x K
  std::vector<int> predecessor;         // D, -1 when none

  TopicWordCounts counts;
  std::vector<double> seed_counts;  // V x K, word-major
  std::vector<double> seed_total;   // K

  std::vector<double> alpha;  // current alpha_k
  std::vector<double> eps;    // adjustment constants eps_k

  int num_topics() const { return counts.num_topics; }
  int num_words() const { return counts.num_words; }
  int num_documents() const { return static_cast<int>(predecessor.size()); }

  std::int32_t doc_count(int d, int k) const {
    return doc_topic[static_cast<std::size_t>(d) * num_topics() + k];
  }
  std::int64_t doc_length(int d) const { return doc_offset[d + 1] - doc_offset[d]; }
  double seed_count(int k, int v) const {
    return seed_counts[static_cast<std::size_t>(v) * num_topics() + k];
  }
  // N_kv and N_k. including seed pseudo-counts.
  double topic_word(int k, int v) const { return counts.at(k, v) + seed_count(k, v); }
  double topic_mass(int k) const {
    return static_cast<double>(counts.topic_total[k]) + seed_total[k];
  }
  double alpha_sum() const;

  // Recomputes seed_total from seed_counts (fixed summation order).
  void refresh_seed_total();
};

struct FitReport {
  int iterations_run = 0;
  std::vector<std::int64_t> delta_history;
  std::vector<double> alpha_final;
  std::vector<std::vector<double>> alpha_trajectory;  // one snapshot per outer iteration
  double elapsed_seconds = 0.0;
  bool converged_early = false;
};

struct FitResult {
  ModelState state;
  FitReport report;
};

// (M_dk + alpha_k) / (M_d. + sum alpha)
std::vector<double> theta(const ModelState& state, int d);
// (N_kv + beta) / (N_k. + V beta)
std::vector<double> phi(const ModelState& state, int k);

// Document prior a_dk: alpha_k, plus gamma * theta(prev)_k * sum(alpha) when
// the document has a predecessor and gamma > 0.
std::vector<double> document_prior(const ModelState& state, int d);

// Unnormalized conditional for a token of word v in document d, assuming the
// token's current assignment has already been removed from the counts.
std::vector<double> sampling_weights(const ModelState& state, int d, int v);

// The n most probable terms of topic k; ties go to the lower vocabulary id.
std::vector<std::pair<std::string, double>> top_terms(const ModelState& state, int k, int n);

// Hash over every numeric field of the state; used to assert bit-identity.
std::uint64_t fingerprint(const ModelState& state);

// Rebuilds every count from z and the corpus; throws Error on the first
// mismatch.
void check_consistency(const ModelState& state, const Corpus& corpus);

}  // namespace daa
