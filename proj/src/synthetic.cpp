#include "daa/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "daa/error.hpp"

namespace daa {

namespace {

// Inverse-CDF sampler over a fixed distribution.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(const std::vector<double>& probs) : cdf_(probs.size()) {
    std::partial_sum(probs.begin(), probs.end(), cdf_.begin());
  }
  int operator()(Rng& rng) const {
    const double u = uniform01(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  }

 private:
  std::vector<double> cdf_;
};

void require_distribution(const std::vector<double>& p, std::size_t size, const std::string& what) {
  if (p.size() != size) throw Error(what + " has " + std::to_string(p.size()) + " entries, expected " + std::to_string(size));
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw Error(what + " has a negative or NaN entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw Error(what + " sums to " + std::to_string(sum) + ", not 1");
}

std::string term_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>(c - 'A' + 'a');
    } else if (c == ' ' || c == '-') {
      out += '_';
    } else {
      out += c;
    }
  }
  return out;
}

std::vector<double> zipf(int n, double exponent, int offset = 0) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[(j + offset) % n] = 1.0 / std::pow(j + 1.0, exponent);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= sum;
  return w;
}

std::string padded(int j) { return j < 10 ? "0" + std::to_string(j) : std::to_string(j); }

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
  const std::size_t k_count = spec.proportions.size();
  if (k_count == 0) throw Error("synthetic corpus needs at least one topic");
  if (spec.topic_names.size() != k_count) throw Error("topic names do not match proportions");
  require_distribution(spec.proportions, k_count, "topic proportions");
  if (spec.topic_word.size() != k_count) throw Error("one word distribution per topic is required");
  for (std::size_t k = 0; k < k_count; ++k) {
    require_distribution(spec.topic_word[k], spec.terms.size(), "word distribution of " + spec.topic_names[k]);
  }
  const bool has_background = spec.background_weight > 0.0;
  if (has_background && spec.background.empty()) throw Error("background weight set without a background theme");
  if (has_background) {
    for (const auto& b : spec.background) require_distribution(b, spec.terms.size(), "background distribution");
  }
  if (spec.vague < 0.0 || spec.vague > 1.0) throw Error("vague share must be in [0, 1]");
  if (spec.vague > 0.0) {
    if (spec.vague_word.size() != k_count) throw Error("vague documents need one distribution per topic");
    for (std::size_t k = 0; k < k_count; ++k) {
      require_distribution(spec.vague_word[k], spec.terms.size(), "vague distribution of " + spec.topic_names[k]);
    }
  }
  if (spec.mean_length < 1.0) throw Error("mean document length must be >= 1");
  if (spec.chain_length < 1) throw Error("chain length must be >= 1");
  if (spec.num_documents < 0) throw Error("document count must be >= 0");

  const Categorical pick_topic(spec.proportions);
  std::vector<Categorical> pick_word;
  pick_word.reserve(k_count);
  for (const auto& p : spec.topic_word) pick_word.emplace_back(p);
  std::vector<Categorical> pick_background;
  if (has_background) {
    for (const auto& b : spec.background) pick_background.emplace_back(b);
  }
  const int n_themes = static_cast<int>(pick_background.size());
  std::vector<Categorical> pick_vague;
  if (spec.vague > 0.0) {
    for (const auto& p : spec.vague_word) pick_vague.emplace_back(p);
  }
  std::poisson_distribution<int> extra_length(spec.mean_length - 1.0);

  SyntheticCorpus out;
  out.corpus.vocabulary = Vocabulary(spec.terms);
  out.corpus.documents.reserve(static_cast<std::size_t>(spec.num_documents));
  const int n_chains = (spec.num_documents + spec.chain_length - 1) / spec.chain_length;
  int topic = 0;
  for (int d = 0; d < spec.num_documents; ++d) {
    const int chain = d / spec.chain_length;
    const int position = d % spec.chain_length;
    if (position == 0 || uniform01(rng) >= spec.persistence) topic = pick_topic(rng);

    Document doc;
    doc.id = "d" + std::to_string(d);
    if (spec.chain_length > 1) {
      doc.parent_id = "p" + std::to_string(chain);
      doc.seq_index = position;
    }
    if (spec.num_years > 0) {
      const int year = spec.first_year + static_cast<int>(static_cast<std::int64_t>(chain) * spec.num_years / n_chains);
      doc.metadata["year"] = std::to_string(year);
    }
    const int length = 1 + (spec.mean_length > 1.0 ? extra_length(rng) : 0);
    const int theme = n_themes > 1 ? std::min(static_cast<int>(uniform01(rng) * n_themes), n_themes - 1) : 0;
    doc.word_ids.reserve(static_cast<std::size_t>(length));
    const bool vague = spec.vague > 0.0 && uniform01(rng) < spec.vague;
    for (int i = 0; i < length; ++i) {
      if (vague) {
        doc.word_ids.push_back(pick_vague[topic](rng));
      } else if (has_background && uniform01(rng) < spec.background_weight) {
        doc.word_ids.push_back(pick_background[theme](rng));
      } else if (uniform01(rng) < spec.focus) {
        doc.word_ids.push_back(pick_word[topic](rng));
      } else {
        doc.word_ids.push_back(pick_word[pick_topic(rng)](rng));
      }
    }
    doc.label = spec.topic_names[topic];
    out.corpus.total_tokens += length;
    out.gold.push_back(spec.topic_names[topic]);
    out.gold_topic.push_back(topic);
    out.corpus.documents.push_back(std::move(doc));
  }
  return out;
}

SyntheticSpec make_world(const WorldOptions& options) {
  const int k_count = static_cast<int>(options.topic_names.size());
  if (k_count == 0 || options.proportions.size() != options.topic_names.size()) {
    throw Error("world needs one proportion per topic name");
  }
  if (options.words_per_topic < 1) throw Error("words per topic must be >= 1");
  SyntheticSpec spec;
  spec.topic_names = options.topic_names;
  const double total = std::accumulate(options.proportions.begin(), options.proportions.end(), 0.0);
  for (double p : options.proportions) spec.proportions.push_back(p / total);

  for (const auto& name : options.topic_names) {
    auto stem = term_stem(name);
    // "topic1" + "100" would collide with "topic11" + "00"
    if (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem += '_';
    for (int j = 0; j < options.words_per_topic; ++j) spec.terms.push_back(stem + padded(j));
  }
  const int shared_begin = static_cast<int>(spec.terms.size());
  for (int j = 0; j < options.shared_words; ++j) spec.terms.push_back("shared" + padded(j));
  const int background_begin = static_cast<int>(spec.terms.size());
  const int themes = std::max(1, options.background_themes);
  for (int t = 0; t < themes; ++t) {
    const std::string stem = themes == 1 ? "generic" : themes <= 26 ? "generic" + std::string(1, static_cast<char>('a' + t))
                                                                    : "generic" + std::to_string(t) + "_";
    for (int j = 0; j < options.background_words; ++j) spec.terms.push_back(stem + padded(j));
  }
  const std::size_t v_count = spec.terms.size();

  const double shared = options.shared_words > 0 ? options.shared_weight : 0.0;
  const auto own = zipf(options.words_per_topic, options.zipf_exponent);
  if (options.leak < 0.0 || options.leak >= 1.0) throw Error("leak must be in [0, 1)");
  const double leak = k_count > 1 ? options.leak : 0.0;
  for (int k = 0; k < k_count; ++k) {
    std::vector<double> p(v_count, 0.0);
    for (int o = 0; o < k_count; ++o) {
      const double mass = (1.0 - shared) * (o == k ? 1.0 - leak : leak / (k_count - 1));
      for (int j = 0; j < options.words_per_topic; ++j) p[static_cast<std::size_t>(o * options.words_per_topic + j)] = mass * own[j];
    }
    if (shared > 0.0) {
      // each topic emphasizes a different slice of the shared pool
      const auto pool = zipf(options.shared_words, options.zipf_exponent, k * options.shared_words / k_count);
      for (int j = 0; j < options.shared_words; ++j) p[static_cast<std::size_t>(shared_begin + j)] = shared * pool[j];
    }
    spec.topic_word.push_back(std::move(p));
    if (options.shared_words > 0) {
      std::vector<double> q(v_count, 0.0);
      const auto pool = zipf(options.shared_words, options.zipf_exponent, k * options.shared_words / k_count);
      for (int j = 0; j < options.shared_words; ++j) q[static_cast<std::size_t>(shared_begin + j)] = pool[j];
      spec.vague_word.push_back(std::move(q));
    }
  }
  if (options.vague > 0.0 && options.shared_words == 0) throw Error("vague documents need shared words");
  spec.vague = options.vague;
  if (options.background_words > 0 && options.background_weight > 0.0) {
    const auto bg = zipf(options.background_words, options.zipf_exponent);
    for (int t = 0; t < themes; ++t) {
      std::vector<double> p(v_count, 0.0);
      const int begin = background_begin + t * options.background_words;
      for (int j = 0; j < options.background_words; ++j) p[static_cast<std::size_t>(begin + j)] = bg[j];
      spec.background.push_back(std::move(p));
    }
    spec.background_weight = options.background_weight;
  }
  spec.focus = options.focus;
  spec.num_documents = options.num_documents;
  spec.mean_length = options.mean_length;
  spec.chain_length = options.chain_length;
  spec.persistence = options.persistence;
  return spec;
}

SeedDictionary seed_dictionary_for(const SyntheticSpec& spec, int per_topic) {
  SeedDictionary dict;
  const std::size_t k_count = spec.topic_word.size();
  for (std::size_t k = 0; k < k_count; ++k) {
    std::vector<std::size_t> own;
    for (std::size_t v = 0; v < spec.terms.size(); ++v) {
      if (spec.topic_word[k][v] <= 0.0) continue;
      // a term belongs to k when k alone carries most of its mass
      double total = 0.0;
      for (std::size_t o = 0; o < k_count; ++o) total += spec.topic_word[o][v];
      if (spec.topic_word[k][v] > 0.5 * total) own.push_back(v);
    }
    std::stable_sort(own.begin(), own.end(),
                     [&](std::size_t a, std::size_t b) { return spec.topic_word[k][a] > spec.topic_word[k][b]; });
    std::vector<std::string> patterns;
    for (std::size_t i = 0; i < own.size() && static_cast<int>(i) < per_topic; ++i) patterns.push_back(spec.terms[own[i]]);
    dict.entries.emplace_back(spec.topic_names[k], std::move(patterns));
  }
  return dict;
}

}  // namespace daa
