#include "daa/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "daa/error.hpp"

namespace daa {

void ModelConfig::validate(int n_seeded) const {
  if (num_topics < 1) throw ConfigError("number of topics must be >= 1");
  if (num_topics < n_seeded) {
    throw ConfigError("number of topics (" + std::to_string(num_topics) +
                      ") is smaller than the number of seeded topics (" + std::to_string(n_seeded) + ")");
  }
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(nu >= 0.0 && nu < 1.0)) throw ConfigError("nu must be in [0, 1)");
  if (!(seed_weight >= 0.0)) throw ConfigError("seed weight must be >= 0");
  if (max_iter < 10 || max_iter % 10 != 0) throw ConfigError("max_iter must be a multiple of 10, at least 10");
  if (!(batch_size > 0.0 && batch_size <= 1.0)) throw ConfigError("batch size must be in (0, 1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (predict_iter < 1) throw ConfigError("predict_iter must be >= 1");
}

double ModelState::alpha_sum() const { return std::accumulate(alpha.begin(), alpha.end(), 0.0); }

void ModelState::refresh_seed_total() {
  const int k_count = num_topics();
  seed_total.assign(static_cast<std::size_t>(k_count), 0.0);
  for (int v = 0; v < num_words(); ++v) {
    for (int k = 0; k < k_count; ++k) seed_total[k] += seed_count(k, v);
  }
}

std::vector<double> theta(const ModelState& state, int d) {
  const int k_count = state.num_topics();
  const double denom = static_cast<double>(state.doc_length(d)) + state.alpha_sum();
  std::vector<double> out(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) out[k] = (state.doc_count(d, k) + state.alpha[k]) / denom;
  return out;
}

std::vector<double> phi(const ModelState& state, int k) {
  const int v_count = state.num_words();
  const double beta = state.config.beta;
  const double denom = state.topic_mass(k) + v_count * beta;
  std::vector<double> out(static_cast<std::size_t>(v_count));
  for (int v = 0; v < v_count; ++v) out[v] = (state.topic_word(k, v) + beta) / denom;
  return out;
}

std::vector<double> document_prior(const ModelState& state, int d) {
  std::vector<double> prior = state.alpha;
  const int prev = state.predecessor[d];
  const double gamma = state.config.gamma;
  if (prev < 0 || gamma == 0.0) return prior;
  const auto pi = theta(state, prev);
  const double mass = state.alpha_sum();
  for (std::size_t k = 0; k < prior.size(); ++k) prior[k] += gamma * pi[k] * mass;
  return prior;
}

std::vector<double> sampling_weights(const ModelState& state, int d, int v) {
  const int k_count = state.num_topics();
  const double beta = state.config.beta;
  const double v_beta = state.num_words() * beta;
  const auto prior = document_prior(state, d);
  std::vector<double> w(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    w[k] = (state.doc_count(d, k) + prior[k]) * (state.topic_word(k, v) + beta) /
           (state.topic_mass(k) + v_beta);
  }
  return w;
}

std::vector<std::pair<std::string, double>> top_terms(const ModelState& state, int k, int n) {
  const auto p = phi(state, k);
  std::vector<int> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  const auto take = static_cast<std::size_t>(std::clamp(n, 0, static_cast<int>(p.size())));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](int a, int b) { return p[a] > p[b] || (p[a] == p[b] && a < b); });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.emplace_back(state.vocabulary.term(order[i]), p[order[i]]);
  return out;
}

namespace {

// FNV-1a over raw bytes.
class Hasher {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  template <class T>
  void vec(const std::vector<T>& v) {
    const std::uint64_t n = v.size();
    bytes(&n, sizeof n);
    if (!v.empty()) bytes(v.data(), v.size() * sizeof(T));
  }
  template <class T>
  void value(const T& x) {
    bytes(&x, sizeof x);
  }
  std::uint64_t get() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t fingerprint(const ModelState& state) {
  Hasher h;
  const auto& c = state.config;
  h.value(c.num_topics);
  h.value(c.alpha);
  h.value(c.beta);
  h.value(c.gamma);
  h.value(c.nu);
  h.value(c.seed_weight);
  h.value(c.rng_seed);
  h.value(state.n_seeded);
  for (const auto& t : state.vocabulary.terms()) h.bytes(t.data(), t.size() + 1);
  for (const auto& t : state.topic_labels) h.bytes(t.data(), t.size() + 1);
  h.vec(state.doc_offset);
  h.vec(state.z);
  h.vec(state.doc_topic);
  h.vec(state.predecessor);
  h.vec(state.counts.word_topic);
  h.vec(state.counts.topic_total);
  h.vec(state.seed_counts);
  h.vec(state.seed_total);
  h.vec(state.alpha);
  h.vec(state.eps);
  return h.get();
}

void check_consistency(const ModelState& state, const Corpus& corpus) {
  const int k_count = state.num_topics();
  const int v_count = state.num_words();
  if (corpus.num_documents() != state.num_documents()) throw Error("state and corpus differ in size");
  TopicWordCounts rebuilt(k_count, v_count);
  for (int d = 0; d < state.num_documents(); ++d) {
    const auto& words = corpus.documents[d].word_ids;
    if (static_cast<std::int64_t>(words.size()) != state.doc_length(d)) {
      throw Error("document length mismatch in document " + std::to_string(d));
    }
    std::vector<std::int32_t> row(static_cast<std::size_t>(k_count), 0);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const int k = state.z[static_cast<std::size_t>(state.doc_offset[d]) + i];
      if (k < 0 || k >= k_count) throw Error("assignment out of range in document " + std::to_string(d));
      ++row[k];
      rebuilt.add(k, words[i], 1);
    }
    for (int k = 0; k < k_count; ++k) {
      if (row[k] != state.doc_count(d, k)) {
        throw Error("document-topic count mismatch in document " + std::to_string(d));
      }
    }
  }
  if (rebuilt.word_topic != state.counts.word_topic) throw Error("topic-word counts do not match assignments");
  if (rebuilt.topic_total != state.counts.topic_total) throw Error("topic totals do not match assignments");
}

}  // namespace daa
