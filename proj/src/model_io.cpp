#include "daa/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "daa/error.hpp"

namespace daa {

using nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t x) {
  std::ostringstream out;
  out << std::hex << x;
  return out.str();
}

ordered_json config_to_json(const ModelConfig& c) {
  ordered_json j;
  j["num_topics"] = c.num_topics;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["nu"] = c.nu;
  j["seed_weight"] = c.seed_weight;
  j["max_iter"] = c.max_iter;
  j["batch_size"] = c.batch_size;
  j["workers"] = c.workers;
  j["auto_stop"] = c.auto_stop;
  j["rng_seed"] = c.rng_seed;
  j["predict_iter"] = c.predict_iter;
  return j;
}

ModelConfig config_from_json(const ordered_json& j) {
  ModelConfig c;
  c.num_topics = j.at("num_topics").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.nu = j.at("nu").get<double>();
  c.seed_weight = j.at("seed_weight").get<double>();
  c.max_iter = j.at("max_iter").get<int>();
  c.batch_size = j.at("batch_size").get<double>();
  c.workers = j.at("workers").get<int>();
  c.auto_stop = j.at("auto_stop").get<bool>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.predict_iter = j.at("predict_iter").get<int>();
  return c;
}

}  // namespace

std::uint64_t vocabulary_checksum(const Vocabulary& vocabulary) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& term : vocabulary.terms()) {
    for (unsigned char c : term) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // term separator
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_model(const ModelState& state, const Preprocessing& preprocessing, std::ostream& out) {
  const int k_count = state.num_topics();
  ordered_json j;
  j["format"] = "daa-model";
  j["version"] = kModelFormatVersion;
  j["config"] = config_to_json(state.config);
  j["rng_seed"] = state.config.rng_seed;
  j["vocabulary"] = state.vocabulary.terms();
  j["vocab_checksum"] = hex64(vocabulary_checksum(state.vocabulary));
  j["topic_labels"] = state.topic_labels;
  j["n_seeded"] = state.n_seeded;
  j["alpha"] = state.alpha;
  j["eps"] = state.eps;

  ordered_json seeds = ordered_json::array();
  ordered_json counts = ordered_json::array();
  for (int v = 0; v < state.num_words(); ++v) {
    for (int k = 0; k < k_count; ++k) {
      if (const double s = state.seed_count(k, v); s != 0.0) seeds.push_back({k, v, s});
      if (const auto n = state.counts.at(k, v); n != 0) counts.push_back({k, v, n});
    }
  }
  j["seed_counts"] = std::move(seeds);
  j["topic_word"] = std::move(counts);

  ordered_json pre;
  pre["lowercase"] = preprocessing.options.lowercase;
  std::vector<std::string> stopwords(preprocessing.options.stopwords.begin(), preprocessing.options.stopwords.end());
  std::sort(stopwords.begin(), stopwords.end());
  pre["stopwords"] = stopwords;
  pre["min_count"] = preprocessing.min_count;
  ordered_json dict = ordered_json::object();
  for (const auto& [label, patterns] : preprocessing.dictionary.entries) dict[label] = patterns;
  pre["dictionary"] = std::move(dict);
  j["preprocessing"] = std::move(pre);
  out << j.dump(1) << '\n';
}

void save_model(const ModelState& state, const Preprocessing& preprocessing,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  save_model(state, preprocessing, out);
  if (!out) throw Error("failed writing " + path.string());
}

ModelFile load_model(std::istream& in) {
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != "daa-model") throw Error("not a model file");
    if (!j.contains("version")) throw Error("model file has no version");
    const int version = j.at("version").get<int>();
    if (version > kModelFormatVersion) {
      throw Error("model file version " + std::to_string(version) + " is newer than supported version " +
                  std::to_string(kModelFormatVersion));
    }

    ModelFile file;
    ModelState& state = file.state;
    state.config = config_from_json(j.at("config"));
    state.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    if (j.at("vocab_checksum").get<std::string>() != hex64(vocabulary_checksum(state.vocabulary))) {
      throw Error("vocabulary checksum mismatch");
    }
    state.topic_labels = j.at("topic_labels").get<std::vector<std::string>>();
    state.n_seeded = j.at("n_seeded").get<int>();
    const int k_count = state.config.num_topics;
    const int v_count = state.vocabulary.size();
    if (static_cast<int>(state.topic_labels.size()) != k_count) throw Error("topic label count does not match K");
    state.alpha = j.at("alpha").get<std::vector<double>>();
    state.eps = j.at("eps").get<std::vector<double>>();
    if (static_cast<int>(state.alpha.size()) != k_count || static_cast<int>(state.eps.size()) != k_count) {
      throw Error("prior vectors do not match K");
    }

    state.counts = TopicWordCounts(k_count, v_count);
    state.seed_counts.assign(static_cast<std::size_t>(v_count) * k_count, 0.0);
    auto cell = [&](const ordered_json& t) {
      const int k = t.at(0).get<int>();
      const int v = t.at(1).get<int>();
      if (k < 0 || k >= k_count || v < 0 || v >= v_count) throw Error("count triplet out of range");
      return static_cast<std::size_t>(v) * k_count + k;
    };
    for (const auto& t : j.at("seed_counts")) state.seed_counts[cell(t)] = t.at(2).get<double>();
    for (const auto& t : j.at("topic_word")) {
      const int k = t.at(0).get<int>();
      const auto n = t.at(2).get<std::int32_t>();
      if (n < 0) throw Error("negative topic-word count");
      state.counts.word_topic[cell(t)] = n;
      state.counts.topic_total[k] += n;
    }
    state.refresh_seed_total();
    state.doc_offset = {0};

    const auto& pre = j.at("preprocessing");
    file.preprocessing.options.lowercase = pre.at("lowercase").get<bool>();
    for (const auto& w : pre.at("stopwords")) file.preprocessing.options.stopwords.insert(w.get<std::string>());
    file.preprocessing.min_count = pre.at("min_count").get<int>();
    for (const auto& [label, patterns] : pre.at("dictionary").items()) {
      file.preprocessing.dictionary.entries.emplace_back(label, patterns.get<std::vector<std::string>>());
    }
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load_model(in);
}

}  // namespace daa
