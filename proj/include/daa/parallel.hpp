#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "daa/corpus.hpp"
#include "daa/model.hpp"
#include "daa/random.hpp"

namespace daa {

struct BatchPlan {
  std::vector<std::vector<int>> batches;  // document indices in visiting order
  std::vector<int> worker_of_batch;
  double batch_size_fraction = 1.0;
  int workers = 1;

  // Concatenation of the worker's batches in batch order.
  std::vector<int> worker_documents(int worker) const;
};

// ceil(1 / batch_size) batches of about D * batch_size documents each, cut on
// parent-chain boundaries, dealt round-robin to workers.
BatchPlan partition(const Corpus& corpus, double batch_size, int workers);

// Throws Error unless the plan covers every document exactly once and keeps
// each parent chain inside one batch.
void validate_plan(const BatchPlan& plan, const Corpus& corpus);

struct WordTopicDelta {
  int word = 0;
  int topic = 0;
  std::int32_t delta = 0;
  bool operator==(const WordTopicDelta&) const = default;
};

struct WorkerDelta {
  std::vector<WordTopicDelta> n_delta;  // nonzero cells, word-major order
  std::vector<std::int64_t> topic_delta;
  std::int64_t changed = 0;  // tokens changed in the last sweep
};

// Runs `sweeps` sweeps over `docs` against a private copy of `snapshot`. Only
// z and document-topic rows of `docs` are written in `state`, so workers with
// disjoint documents may run concurrently.
WorkerDelta worker_run(const TopicWordCounts& snapshot, ModelState& state, const Corpus& corpus,
                       std::span<const int> docs, int sweeps, Rng& rng);

// Adds the deltas to the global counts in the given order and returns the
// summed changed-token count. Throws Error if a count would become negative.
std::int64_t merge(ModelState& state, std::span<const WorkerDelta> deltas);

FitResult fit(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds);
FitResult fit(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds,
              const BatchPlan& plan);

}  // namespace daa
