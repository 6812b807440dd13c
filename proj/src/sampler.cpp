#include "daa/sampler.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "daa/error.hpp"
#include "daa/log.hpp"

namespace daa {

namespace {

std::vector<int> visiting_order(const Corpus& corpus) {
  std::vector<int> order;
  order.reserve(corpus.documents.size());
  for (const auto& chain : document_chains(corpus)) order.insert(order.end(), chain.begin(), chain.end());
  return order;
}

}  // namespace

ModelState initialize(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds,
                      Rng& rng) {
  config.validate(seeds.n_seeded());
  const int k_count = config.num_topics;
  const int v_count = corpus.vocabulary.size();
  const int d_count = corpus.num_documents();

  ModelState state;
  state.config = config;
  state.vocabulary = corpus.vocabulary;
  state.n_seeded = seeds.n_seeded();
  state.topic_labels = seeds.labels;
  for (int u = 1; static_cast<int>(state.topic_labels.size()) < k_count; ++u) {
    state.topic_labels.push_back("Other" + std::to_string(u));
  }

  state.doc_offset.assign(static_cast<std::size_t>(d_count) + 1, 0);
  for (int d = 0; d < d_count; ++d) {
    state.doc_offset[d + 1] = state.doc_offset[d] + static_cast<std::int64_t>(corpus.documents[d].word_ids.size());
  }
  state.z.assign(static_cast<std::size_t>(state.doc_offset.back()), 0);
  state.doc_topic.assign(static_cast<std::size_t>(d_count) * k_count, 0);
  state.predecessor = predecessors(corpus);
  state.counts = TopicWordCounts(k_count, v_count);

  for (int d = 0; d < d_count; ++d) {
    const auto& words = corpus.documents[d].word_ids;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i] < 0 || words[i] >= v_count) throw Error("word id out of range in document " + corpus.documents[d].id);
      const int k = std::min(static_cast<int>(uniform01(rng) * k_count), k_count - 1);
      state.z[static_cast<std::size_t>(state.doc_offset[d]) + i] = k;
      ++state.doc_topic[static_cast<std::size_t>(d) * k_count + k];
      state.counts.add(k, words[i], 1);
    }
  }

  state.seed_counts.assign(static_cast<std::size_t>(v_count) * k_count, 0.0);
  const double cell = v_count > 0
                          ? config.seed_weight * static_cast<double>(corpus.total_tokens) / v_count
                          : 0.0;
  for (int k = 0; k < state.n_seeded; ++k) {
    for (int v : seeds.topic_words[k]) {
      if (v < 0 || v >= v_count) throw Error("seed word id out of range");
      state.seed_counts[static_cast<std::size_t>(v) * k_count + k] = cell;
    }
  }
  state.refresh_seed_total();

  state.alpha.assign(static_cast<std::size_t>(k_count), config.alpha);
  state.eps.assign(static_cast<std::size_t>(k_count), 0.0);
  if (config.nu > 0.0) {
    for (int k = 0; k < k_count; ++k) {
      const auto initial = state.counts.topic_total[k];
      if (initial == 0) {
        warn("topic " + std::to_string(k) + " received no tokens at initialization; its prior stays fixed");
        continue;
      }
      state.eps[k] = config.nu * config.alpha / static_cast<double>(initial);
    }
  }
  return state;
}

std::int64_t sweep(ModelState& state, const Corpus& corpus, std::span<const int> docs,
                   TopicWordCounts& counts, Rng& rng) {
  const int k_count = state.num_topics();
  const double beta = state.config.beta;
  const double v_beta = state.num_words() * beta;
  const double gamma = state.config.gamma;
  const double alpha_mass = state.alpha_sum();

  std::vector<double> prior(static_cast<std::size_t>(k_count));
  std::vector<double> cumulative(static_cast<std::size_t>(k_count));
  std::int64_t changed = 0;

  for (int d : docs) {
    const auto& words = corpus.documents[d].word_ids;
    if (words.empty()) continue;

    std::copy(state.alpha.begin(), state.alpha.end(), prior.begin());
    if (const int prev = state.predecessor[d]; prev >= 0 && gamma > 0.0) {
      // theta of the predecessor as it stands now
      const double denom = static_cast<double>(state.doc_length(prev)) + alpha_mass;
      const std::int32_t* prev_row = &state.doc_topic[static_cast<std::size_t>(prev) * k_count];
      for (int k = 0; k < k_count; ++k) {
        prior[k] += gamma * ((prev_row[k] + state.alpha[k]) / denom) * alpha_mass;
      }
    }

    std::int32_t* row = &state.doc_topic[static_cast<std::size_t>(d) * k_count];
    int* zd = &state.z[static_cast<std::size_t>(state.doc_offset[d])];
    for (std::size_t i = 0; i < words.size(); ++i) {
      const int v = words[i];
      const int old_topic = zd[i];
      const std::size_t base = static_cast<std::size_t>(v) * k_count;
      --row[old_topic];
      --counts.word_topic[base + old_topic];
      --counts.topic_total[old_topic];

      const std::int32_t* nw = &counts.word_topic[base];
      const double* sw = &state.seed_counts[base];
      double total = 0.0;
      for (int k = 0; k < k_count; ++k) {
        total += (row[k] + prior[k]) * (nw[k] + sw[k] + beta) /
                 (static_cast<double>(counts.topic_total[k]) + state.seed_total[k] + v_beta);
        cumulative[k] = total;
      }
      const double u = uniform01(rng) * total;
      int new_topic = k_count - 1;
      for (int k = 0; k < k_count; ++k) {
        if (u < cumulative[k]) {
          new_topic = k;
          break;
        }
      }

      ++row[new_topic];
      ++counts.word_topic[base + new_topic];
      ++counts.topic_total[new_topic];
      if (new_topic != old_topic) {
        zd[i] = new_topic;
        ++changed;
      }
    }
  }
  return changed;
}

std::int64_t sweep(ModelState& state, const Corpus& corpus, std::span<const int> docs, Rng& rng) {
  return sweep(state, corpus, docs, state.counts, rng);
}

std::vector<double> project_priors(std::vector<double> proposed, double floor, double total) {
  const std::size_t n = proposed.size();
  std::vector<bool> clamped(n);
  for (std::size_t k = 0; k < n; ++k) clamped[k] = proposed[k] < floor;
  for (;;) {
    double fixed = 0.0;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (clamped[k]) {
        fixed += floor;
      } else {
        free_sum += proposed[k];
        ++free_count;
      }
    }
    if (free_count == 0) {
      warn("every prior hit the floor; the total prior mass is not preserved");
      return std::vector<double>(n, floor);
    }
    const double scale = (total - fixed) / free_sum;
    bool grew = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!clamped[k] && proposed[k] * scale < floor) {
        clamped[k] = true;
        grew = true;
      }
    }
    if (grew) continue;
    for (std::size_t k = 0; k < n; ++k) proposed[k] = clamped[k] ? floor : proposed[k] * scale;
    return proposed;
  }
}

const std::vector<double>& adjust_priors(ModelState& state, std::span<const std::int64_t> topic_deltas) {
  const double nu = state.config.nu;
  if (nu == 0.0) return state.alpha;
  const int k_count = state.num_topics();
  if (static_cast<int>(topic_deltas.size()) != k_count) throw Error("topic delta vector has the wrong length");
  std::vector<double> proposed(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    proposed[k] = state.alpha[k] + state.eps[k] * static_cast<double>(topic_deltas[k]);
  }
  state.alpha = project_priors(std::move(proposed), (1.0 - nu) * state.config.alpha,
                               k_count * state.config.alpha);
  return state.alpha;
}

Convergence check_convergence(std::span<const std::int64_t> delta_history) {
  const std::size_t n = delta_history.size();
  if (n < 2) return Convergence::kContinue;
  return delta_history[n - 1] > delta_history[n - 2] ? Convergence::kStop : Convergence::kContinue;
}

FitResult fit_serial(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds) {
  const auto start = std::chrono::steady_clock::now();
  Rng init_rng = make_stream(config.rng_seed, kInitStream);
  FitResult result{initialize(corpus, config, seeds, init_rng), {}};
  ModelState& state = result.state;
  FitReport& report = result.report;
  const auto order = visiting_order(corpus);
  const int outer = config.max_iter / kSweepsPerIteration;

  for (int i = 0; i < outer; ++i) {
    Rng rng = make_stream(config.rng_seed, kSampleStream + static_cast<std::uint64_t>(i), 0);
    const auto before = state.counts.topic_total;
    std::int64_t delta = 0;
    for (int j = 0; j < kSweepsPerIteration; ++j) delta = sweep(state, corpus, order, rng);
    report.iterations_run += kSweepsPerIteration;

    std::vector<std::int64_t> topic_deltas(before.size());
    for (std::size_t k = 0; k < before.size(); ++k) topic_deltas[k] = state.counts.topic_total[k] - before[k];
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
