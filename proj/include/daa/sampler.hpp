#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "daa/corpus.hpp"
#include "daa/model.hpp"
#include "daa/random.hpp"

namespace daa {

// Number of sweeps between synchronizations, prior adjustments and delta
// measurements.
inline constexpr int kSweepsPerIteration = 10;

enum class Convergence { kContinue, kStop };

// Random initial assignment, seed pseudo-counts and eps_k.
ModelState initialize(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds,
                      Rng& rng);

// Resamples every token of `docs` once, in the given order, against `counts`.
// Document-topic rows and z are updated in `state`. Returns the number of
// tokens whose topic changed.
std::int64_t sweep(ModelState& state, const Corpus& corpus, std::span<const int> docs,
                   TopicWordCounts& counts, Rng& rng);
std::int64_t sweep(ModelState& state, const Corpus& corpus, std::span<const int> docs, Rng& rng);

// alpha_k += eps_k * topic_deltas[k], then projected onto
// {sum = K alpha, alpha_k >= (1 - nu) alpha}. No-op when nu == 0.
const std::vector<double>& adjust_priors(ModelState& state, std::span<const std::int64_t> topic_deltas);

// Clamp entries below `floor` and rescale the rest by a common factor until the
// vector sums to `total`. Warns and returns the clamped vector if every entry
// ends up clamped.
std::vector<double> project_priors(std::vector<double> proposed, double floor, double total);

Convergence check_convergence(std::span<const std::int64_t> delta_history);

FitResult fit_serial(const Corpus& corpus, const ModelConfig& config, const SeedAssignment& seeds);

}  // namespace daa
