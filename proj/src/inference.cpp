#include "daa/inference.hpp"

#include <cmath>
#include <numeric>

#include "daa/error.hpp"

namespace daa {

namespace {

// phi in word-major layout.
std::vector<double> phi_by_word(const ModelState& state) {
  const int k_count = state.num_topics();
  const int v_count = state.num_words();
  std::vector<double> out(static_cast<std::size_t>(v_count) * k_count);
  for (int k = 0; k < k_count; ++k) {
    const auto row = phi(state, k);
    for (int v = 0; v < v_count; ++v) out[static_cast<std::size_t>(v) * k_count + k] = row[v];
  }
  return out;
}

void require_model_vocabulary(const ModelState& state, const Corpus& test) {
  if (test.vocabulary.size() != state.num_words()) {
    throw Error("test corpus is not mapped into the model vocabulary");
  }
}

}  // namespace

int argmax_topic(const std::vector<double>& weights, int limit) {
  int best = 0;
  for (int k = 1; k < limit; ++k) {
    if (weights[k] > weights[best]) best = k;
  }
  return best;
}

Prediction predict(const ModelState& state, const Corpus& test, const PredictOptions& options,
                   Rng& rng) {
  require_model_vocabulary(state, test);
  if (options.iterations < 1) throw ConfigError("prediction needs at least one iteration");
  const int k_count = state.num_topics();
  const int d_count = test.num_documents();
  const auto phi_w = phi_by_word(state);
  const auto& alpha = state.alpha;
  const double alpha_mass = state.alpha_sum();
  const double gamma = state.config.gamma;
  const auto prev = predecessors(test);

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(d_count));
  for (const auto& chain : document_chains(test)) order.insert(order.end(), chain.begin(), chain.end());

  std::vector<std::int32_t> m(static_cast<std::size_t>(d_count) * k_count, 0);
  std::vector<std::vector<int>> z(static_cast<std::size_t>(d_count));
  for (int d = 0; d < d_count; ++d) {
    const auto& words = test.documents[d].word_ids;
    z[d].resize(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i] < 0 || words[i] >= state.num_words()) throw Error("test word id out of range");
      const int k = std::min(static_cast<int>(uniform01(rng) * k_count), k_count - 1);
      z[d][i] = k;
      ++m[static_cast<std::size_t>(d) * k_count + k];
    }
  }

  std::vector<double> prior(static_cast<std::size_t>(k_count));
  std::vector<double> cumulative(static_cast<std::size_t>(k_count));
  for (int it = 0; it < options.iterations; ++it) {
    for (int d : order) {
      const auto& words = test.documents[d].word_ids;
      if (words.empty()) continue;
      std::copy(alpha.begin(), alpha.end(), prior.begin());
      if (prev[d] >= 0 && gamma > 0.0) {
        const int p = prev[d];
        const double denom = static_cast<double>(test.documents[p].word_ids.size()) + alpha_mass;
        const std::int32_t* prev_row = &m[static_cast<std::size_t>(p) * k_count];
        for (int k = 0; k < k_count; ++k) prior[k] += gamma * ((prev_row[k] + alpha[k]) / denom) * alpha_mass;
      }
      std::int32_t* row = &m[static_cast<std::size_t>(d) * k_count];
      for (std::size_t i = 0; i < words.size(); ++i) {
        const double* pw = &phi_w[static_cast<std::size_t>(words[i]) * k_count];
        --row[z[d][i]];
        double total = 0.0;
        for (int k = 0; k < k_count; ++k) {
          total += (row[k] + prior[k]) * pw[k];
          cumulative[k] = total;
        }
        const double u = uniform01(rng) * total;
        int topic = k_count - 1;
        for (int k = 0; k < k_count; ++k) {
          if (u < cumulative[k]) {
            topic = k;
            break;
          }
        }
        z[d][i] = topic;
        ++row[topic];
      }
    }
  }

  const int limit = options.seeded_only_labels && state.n_seeded > 0 ? state.n_seeded : k_count;
  Prediction out;
  out.theta.resize(static_cast<std::size_t>(d_count));
  out.label.resize(static_cast<std::size_t>(d_count));
  for (int d = 0; d < d_count; ++d) {
    const double denom = static_cast<double>(test.documents[d].word_ids.size()) + alpha_mass;
    auto& th = out.theta[d];
    th.resize(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k) th[k] = (m[static_cast<std::size_t>(d) * k_count + k] + alpha[k]) / denom;
    out.label[d] = argmax_topic(th, limit);
  }
  return out;
}

double perplexity(const ModelState& state, const Corpus& test,
                  const std::vector<std::vector<double>>& theta) {
  require_model_vocabulary(state, test);
  if (theta.size() != test.documents.size()) throw Error("theta does not match the test corpus");
  const int k_count = state.num_topics();
  const auto phi_w = phi_by_word(state);
  double log_likelihood = 0.0;
  std::int64_t n_test = 0;
  for (std::size_t d = 0; d < test.documents.size(); ++d) {
    const auto& th = theta[d];
    if (static_cast<int>(th.size()) != k_count) throw Error("theta vector has the wrong length");
    for (int v : test.documents[d].word_ids) {
      const double* pw = &phi_w[static_cast<std::size_t>(v) * k_count];
      double p = 0.0;
      for (int k = 0; k < k_count; ++k) p += th[k] * pw[k];
      log_likelihood += std::log(p);
      ++n_test;
    }
  }
  if (n_test == 0) throw Error("no scorable tokens");
  return std::exp(-log_likelihood / static_cast<double>(n_test));
}

}  // namespace daa
