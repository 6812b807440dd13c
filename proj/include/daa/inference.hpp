#pragma once

#include <vector>

#include "daa/corpus.hpp"
#include "daa/model.hpp"
#include "daa/random.hpp"

namespace daa {

struct Prediction {
  std::vector<std::vector<double>> theta;  // per document, length K
  std::vector<int> label;                  // topic index
};

struct PredictOptions {
  int iterations = 100;
  bool seeded_only_labels = false;
};

// Gibbs sampling over the test tokens with the topic-word counts and alpha_k
// frozen. `test` must use the model vocabulary (see map_to_vocabulary).
Prediction predict(const ModelState& state, const Corpus& test, const PredictOptions& options,
                   Rng& rng);

// exp(-sum log sum_k theta_dk phi_kv / N_test) over all test tokens.
double perplexity(const ModelState& state, const Corpus& test,
                  const std::vector<std::vector<double>>& theta);

// argmax over topics [0, limit), ties to the lower index.
int argmax_topic(const std::vector<double>& weights, int limit);

}  // namespace daa
