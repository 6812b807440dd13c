#include "daa/parallel.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "daa/error.hpp"
#include "daa/sampler.hpp"

namespace daa {

std::vector<int> BatchPlan::worker_documents(int worker) const {
  std::vector<int> docs;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    if (worker_of_batch[b] == worker) docs.insert(docs.end(), batches[b].begin(), batches[b].end());
  }
  return docs;
}

BatchPlan partition(const Corpus& corpus, double batch_size, int workers) {
  if (!(batch_size > 0.0 && batch_size <= 1.0)) throw ConfigError("batch size must be in (0, 1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  BatchPlan plan;
  plan.batch_size_fraction = batch_size;
  plan.workers = workers;
  const auto d_count = static_cast<std::int64_t>(corpus.documents.size());
  if (d_count == 0) return plan;

  // the epsilon keeps 1 / 0.01 from rounding up to 101 batches
  auto n_batches = static_cast<std::int64_t>(std::ceil(1.0 / batch_size - 1e-9));
  n_batches = std::clamp<std::int64_t>(n_batches, 1, d_count);

  std::vector<int> current;
  std::int64_t placed = 0;
  std::int64_t closed = 0;  // batch boundaries passed so far
  for (const auto& chain : document_chains(corpus)) {
    current.insert(current.end(), chain.begin(), chain.end());
    placed += static_cast<std::int64_t>(chain.size());
    // boundary b sits after b * D / n_batches documents
    if (closed + 1 < n_batches && placed * n_batches >= (closed + 1) * d_count) {
      plan.batches.push_back(std::move(current));
      current.clear();
      closed = std::max(closed + 1, placed * n_batches / d_count);
    }
  }
  if (!current.empty()) plan.batches.push_back(std::move(current));
  plan.worker_of_batch.resize(plan.batches.size());
  for (std::size_t b = 0; b < plan.batches.size(); ++b) plan.worker_of_batch[b] = static_cast<int>(b % workers);
  return plan;
}

void validate_plan(const BatchPlan& plan, const Corpus& corpus) {
  const int d_count = corpus.num_documents();
  if (plan.worker_of_batch.size() != plan.batches.size()) throw Error("batch plan: worker map has the wrong size");
  std::vector<int> batch_of(static_cast<std::size_t>(d_count), -1);
  for (std::size_t b = 0; b < plan.batches.size(); ++b) {
    if (plan.worker_of_batch[b] < 0 || plan.worker_of_batch[b] >= plan.workers) {
      throw Error("batch plan: worker id out of range");
    }
    for (int d : plan.batches[b]) {
      if (d < 0 || d >= d_count) throw Error("batch plan: document index out of range");
      if (batch_of[d] != -1) throw Error("batch plan: document " + std::to_string(d) + " appears twice");
      batch_of[d] = static_cast<int>(b);
    }
  }
  for (int d = 0; d < d_count; ++d) {
    if (batch_of[d] == -1) throw Error("batch plan: document " + std::to_string(d) + " is not assigned");
  }
  for (const auto& chain : document_chains(corpus)) {
    for (int d : chain) {
      if (batch_of[d] != batch_of[chain.front()]) throw Error("batch plan: a parent chain is split across batches");
    }
  }
}

WorkerDelta worker_run(const TopicWordCounts& snapshot, ModelState& state, const Corpus& corpus,
                       std::span<const int> docs, int sweeps, Rng& rng) {
  TopicWordCounts local = snapshot;
  WorkerDelta out;
  for (int j = 0; j < sweeps; ++j) {
    const auto changed = sweep(state, corpus, docs, local, rng);
    if (j == sweeps - 1) out.changed = changed;
  }
  const int k_count = snapshot.num_topics;
  for (std::size_t i = 0; i < local.word_topic.size(); ++i) {
    const std::int32_t diff = local.word_topic[i] - snapshot.word_topic[i];
    if (diff != 0) {
      out.n_delta.push_back({static_cast<int>(i / k_count), static_cast<int>(i % k_count), diff});
    }
  }
  out.topic_delta.resize(local.topic_total.size());
  for (std::size_t k = 0; k < local.topic_total.size(); ++k) {
    out.topic_delta[k] = local.topic_total[k] - snapshot.topic_total[k];
  }
  return out;
}

std::int64_t merge(ModelState& state, std::span<const WorkerDelta> deltas) {
  auto& counts = state.counts;
  std::int64_t changed = 0;
  for (const auto& delta : deltas) {
    for (const auto& cell : delta.n_delta) {
      auto& n = counts.word_topic[static_cast<std::size_t>(cell.word) * counts.num_topics + cell.topic];
      n += cell.delta;
      if (n < 0) {
        throw Error("merge: topic-word count for word " + std::to_string(cell.word) + ", topic " +
                    std::to_string(cell.topic) + " fell below its seed pseudo-count");
      }
    }
    for (std::size_t k = 0; k < delta.topic_delta.size(); ++k) counts.topic_total[k] += delta.topic_delta[k];
    changed += delta.changed;
  }
  return changed;
}

FitResult fit(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds) {
  return fit(corpus, config, seeds, partition(corpus, config.batch_size, config.workers));
}

FitResult fit(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds,
              const BatchPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  validate_plan(plan, corpus);
  const int workers = plan.workers;

  Rng init_rng = make_stream(config.rng_seed, kInitStream);
  FitResult result{initialize(corpus, config, seeds, init_rng), {}};
  ModelState& state = result.state;
  FitReport& report = result.report;

  std::vector<std::vector<int>> docs(static_cast<std::size_t>(workers));
  for (int e = 0; e < workers; ++e) docs[e] = plan.worker_documents(e);

  const int outer = config.max_iter / kSweepsPerIteration;
  std::vector<WorkerDelta> deltas(static_cast<std::size_t>(workers));
  for (int i = 0; i < outer; ++i) {
    const std::uint64_t stream = kSampleStream + static_cast<std::uint64_t>(i);
    // state.counts is the read-only snapshot until the barrier below
    if (workers == 1) {
      Rng rng = make_stream(config.rng_seed, stream, 0);
      deltas[0] = worker_run(state.counts, state, corpus, docs[0], kSweepsPerIteration, rng);
    } else {
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
      {
        std::vector<std::jthread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int e = 0; e < workers; ++e) {
          threads.emplace_back([&, e] {
            try {
              Rng rng = make_stream(config.rng_seed, stream, static_cast<std::uint64_t>(e));
              deltas[e] = worker_run(state.counts, state, corpus, docs[e], kSweepsPerIteration, rng);
            } catch (...) {
              errors[e] = std::current_exception();
            }
          });
        }
      }
      for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }

    const std::int64_t delta = merge(state, deltas);
    report.iterations_run += kSweepsPerIteration;
    std::vector<std::int64_t> topic_deltas(static_cast<std::size_t>(state.num_topics()), 0);
    for (const auto& wd : deltas) {
      for (std::size_t k = 0; k < topic_deltas.size(); ++k) topic_deltas[k] += wd.topic_delta[k];
    }
    adjust_priors(state, topic_deltas);

    report.delta_history.push_back(delta);
    report.alpha_trajectory.push_back(state.alpha);
    if (config.auto_stop && check_convergence(report.delta_history) == Convergence::kStop) {
      report.converged_early = i + 1 < outer;
      break;
    }
  }
  report.alpha_final = state.alpha;
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace daa
