#include "daa/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "daa/corpus.hpp"
#include "daa/error.hpp"
#include "daa/eval.hpp"
#include "daa/inference.hpp"
#include "daa/model_io.hpp"
#include "daa/parallel.hpp"
#include "daa/synthetic.hpp"

namespace daa {

namespace {

using nlohmann::json;

int default_workers() {
  if (const char* env = std::getenv("DAA_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct FitOptions {
  std::string corpus;
  std::string model;
  std::string report;
  std::string seeds;
  std::string stopwords;
  int min_count = 10;
  ModelConfig config;
  bool k_given = false;
};

struct PredictCliOptions {
  std::string model;
  std::string corpus;
  std::string out;
  int predict_iter = 0;  // 0: use the model's setting
  bool seeded_only = false;
  std::optional<std::uint64_t> rng_seed;
};

struct EvaluateOptions {
  std::string model;
  std::string corpus;
  std::string predictions;
  std::string group_by;
  std::string out;
};

struct TermsOptions {
  std::string model;
  int n = 10;
  std::string topic;
};

struct GenerateOptions {
  std::string out;
  std::string seeds_out;
  std::vector<std::string> topics{"Security", "Development", "UN", "Human rights", "Greeting", "Democracy"};
  std::vector<double> proportions{43.3, 28.0, 18.3, 6.8, 5.7, 3.6};
  WorldOptions world;
  int seeds_per_topic = 5;
  int first_year = 1991;
  int num_years = 0;
  std::uint64_t rng_seed = 0;
};

struct BenchOptions {
  std::string corpus;
  int synthetic_docs = 0;
  double mean_length = 12.8;
  std::vector<int> workers{1, 2, 4, 8};
  std::vector<int> topics{5, 10, 25, 50};
  int reps = 5;
  std::string out;
  ModelConfig config;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  return f;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

json report_to_json(const FitReport& r, const ModelState& state) {
  json j;
  j["iterations_run"] = r.iterations_run;
  j["converged_early"] = r.converged_early;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["delta_history"] = r.delta_history;
  j["alpha_final"] = r.alpha_final;
  j["alpha_trajectory"] = r.alpha_trajectory;
  j["topic_labels"] = state.topic_labels;
  return j;
}

int cmd_fit(FitOptions o, std::ostream& out) {
  Preprocessing pre;
  pre.min_count = o.min_count;
  if (!o.stopwords.empty()) pre.options.stopwords = load_stopwords(o.stopwords);
  if (!o.seeds.empty()) pre.dictionary = load_seed_dictionary(o.seeds);
  const int n_seeded = pre.dictionary.size();
  if (!o.k_given) {
    if (n_seeded == 0) throw ConfigError("--k is required without --seeds");
    o.config.num_topics = n_seeded;
  }
  o.config.validate(n_seeded);
  if (o.min_count < 1) throw ConfigError("--min-count must be >= 1");

  const Corpus corpus = load_corpus(o.corpus, pre);
  const SeedAssignment seeds = match_seeds(corpus.vocabulary, pre.dictionary);
  const FitResult result = fit(corpus, o.config, seeds);
  save_model(result.state, pre, std::filesystem::path(o.model));

  const auto& r = result.report;
  out << "documents        " << corpus.num_documents() << "\n"
      << "tokens           " << corpus.total_tokens << "\n"
      << "vocabulary       " << corpus.vocabulary.size() << "\n"
      << "iterations run   " << r.iterations_run << (r.converged_early ? " (converged)" : "") << "\n"
      << "elapsed seconds  " << std::fixed << std::setprecision(3) << r.elapsed_seconds << "\n"
      << std::defaultfloat << "delta history   ";
  for (auto d : r.delta_history) out << ' ' << d;
  out << "\nalpha\n";
  for (int k = 0; k < result.state.num_topics(); ++k) {
    out << "  " << std::left << std::setw(20) << result.state.topic_labels[k] << std::right << std::fixed
        << std::setprecision(4) << r.alpha_final[k] << std::defaultfloat << "\n";
  }
  const std::string report_path = o.report.empty() ? o.model + ".report.json" : o.report;
  open_output(report_path) << report_to_json(r, result.state).dump(1) << '\n';
  return kExitOk;
}

Corpus load_test_corpus(const std::string& path, const ModelFile& model) {
  const auto raw = read_records(std::filesystem::path(path), model.preprocessing);
  if (raw.empty()) throw Error("no documents in " + path);
  return map_to_vocabulary(raw, model.state.vocabulary);
}

int cmd_predict(const PredictCliOptions& o, std::ostream& out) {
  const ModelFile model = load_model(std::filesystem::path(o.model));
  const Corpus test = load_test_corpus(o.corpus, model);
  PredictOptions options;
  options.iterations = o.predict_iter > 0 ? o.predict_iter : model.state.config.predict_iter;
  options.seeded_only_labels = o.seeded_only;
  Rng rng = make_stream(o.rng_seed.value_or(model.state.config.rng_seed), kPredictStream);
  const Prediction prediction = predict(model.state, test, options, rng);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.out.empty()) {
    file = open_output(o.out);
    sink = &file;
  }
  for (int d = 0; d < test.num_documents(); ++d) {
    json record;
    record["id"] = test.documents[d].id;
    record["label"] = model.state.topic_labels[prediction.label[d]];
    record["theta"] = prediction.theta[d];
    *sink << record.dump() << '\n';
  }
  return kExitOk;
}

struct PredictionRecords {
  LabelMap labels;
  std::map<std::string, std::vector<double>> theta;
};

PredictionRecords read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  PredictionRecords records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto id = j.at("id").get<std::string>();
      records.labels[id] = j.at("label").get<std::string>();
      records.theta[id] = j.at("theta").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return records;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const ModelFile model = load_model(std::filesystem::path(o.model));
  const Corpus test = load_test_corpus(o.corpus, model);
  const PredictionRecords preds = read_predictions(o.predictions);
  const auto& labels = model.state.topic_labels;

  std::vector<std::array<std::string, 4>> rows;  // section, name, metric, value
  auto fmt = [](double x) {
    std::ostringstream s;
    s << std::setprecision(6) << x;
    return s.str();
  };

  LabelMap gold;
  for (const auto& doc : test.documents) {
    if (doc.label) gold[doc.id] = *doc.label;
  }
  if (gold.empty()) {
    out << "no gold labels in " << o.corpus << "; F1 skipped\n";
  } else {
    std::vector<std::string> classes(labels.begin(), labels.begin() + model.state.n_seeded);
    for (const auto& [id, label] : gold) {
      if (std::find(classes.begin(), classes.end(), label) == classes.end()) classes.push_back(label);
    }
    const F1Report f1 = micro_f1(preds.labels, gold, classes);
    out << "F1\n  " << std::left << std::setw(20) << "class" << std::right << std::setw(10) << "precision"
        << std::setw(10) << "recall" << std::setw(10) << "f1" << std::setw(8) << "n" << "\n";
    for (const auto& c : f1.per_class) {
      out << "  " << std::left << std::setw(20) << c.label << std::right << std::fixed << std::setprecision(4)
          << std::setw(10) << c.precision << std::setw(10) << c.recall << std::setw(10) << c.f1
          << std::setw(8) << c.tp + c.fn << std::defaultfloat << "\n";
      rows.push_back({"f1", c.label, "precision", fmt(c.precision)});
      rows.push_back({"f1", c.label, "recall", fmt(c.recall)});
      rows.push_back({"f1", c.label, "f1", fmt(c.f1)});
    }
    out << "  " << std::left << std::setw(20) << "micro" << std::right << std::fixed << std::setprecision(4)
        << std::setw(10) << f1.precision << std::setw(10) << f1.recall << std::setw(10) << f1.f1
        << std::defaultfloat << "\n";
    rows.push_back({"f1", "micro", "precision", fmt(f1.precision)});
    rows.push_back({"f1", "micro", "recall", fmt(f1.recall)});
    rows.push_back({"f1", "micro", "f1", fmt(f1.f1)});
  }

  std::vector<std::vector<double>> theta;
  theta.reserve(test.documents.size());
  for (const auto& doc : test.documents) {
    const auto it = preds.theta.find(doc.id);
    if (it == preds.theta.end()) throw Error("no prediction for document " + doc.id);
    theta.push_back(it->second);
  }
  const double ppl = perplexity(model.state, test, theta);
  out << "perplexity " << std::fixed << std::setprecision(4) << ppl << std::defaultfloat << "\n";
  rows.push_back({"perplexity", "all", "perplexity", fmt(ppl)});

  std::optional<std::string> key;
  if (!o.group_by.empty()) key = o.group_by.starts_with("meta.") ? o.group_by.substr(5) : o.group_by;
  const FrequencyTable table = topic_frequency(preds.labels, test, labels, key);
  out << "topic frequency" << (key ? " by " + *key : "") << "\n  " << std::left << std::setw(10) << "group";
  for (const auto& l : table.labels) out << std::right << std::setw(std::max<int>(8, static_cast<int>(l.size()) + 2)) << l;
  out << "\n";
  for (std::size_t g = 0; g < table.groups.size(); ++g) {
    out << "  " << std::left << std::setw(10) << table.groups[g];
    for (std::size_t l = 0; l < table.labels.size(); ++l) {
      out << std::right << std::setw(std::max<int>(8, static_cast<int>(table.labels[l].size()) + 2)) << table.counts[g][l];
      rows.push_back({"frequency", table.groups[g], table.labels[l], std::to_string(table.counts[g][l])});
    }
    out << "\n";
  }

  if (!o.out.empty()) {
    auto file = open_output(o.out);
    file << "section\tname\tmetric\tvalue\n";
    for (const auto& r : rows) file << r[0] << '\t' << r[1] << '\t' << r[2] << '\t' << r[3] << '\n';
  }
  return kExitOk;
}

int cmd_terms(const TermsOptions& o, std::ostream& out) {
  const ModelFile model = load_model(std::filesystem::path(o.model));
  const auto& state = model.state;
  bool found = o.topic.empty();
  for (int k = 0; k < state.num_topics(); ++k) {
    if (!o.topic.empty() && state.topic_labels[k] != o.topic) continue;
    found = true;
    std::vector<std::string> terms;
    for (const auto& [term, p] : top_terms(state, k, o.n)) terms.push_back(term);
    out << state.topic_labels[k] << "\t" << join(terms, ", ") << "\n";
  }
  if (!found) throw Error("no topic labelled '" + o.topic + "'");
  return kExitOk;
}

int cmd_generate(GenerateOptions o, std::ostream& out) {
  o.world.topic_names = o.topics;
  o.world.proportions = o.proportions;
  SyntheticSpec spec = make_world(o.world);
  spec.first_year = o.first_year;
  spec.num_years = o.num_years;
  Rng rng = make_stream(o.rng_seed, 0x67656e);
  const SyntheticCorpus synthetic = generate_synthetic(spec, rng);
  save_corpus(synthetic.corpus, std::filesystem::path(o.out));
  if (!o.seeds_out.empty()) {
    open_output(o.seeds_out) << format_seed_dictionary(seed_dictionary_for(spec, o.seeds_per_topic));
  }
  out << "wrote " << synthetic.corpus.num_documents() << " documents, " << synthetic.corpus.total_tokens
      << " tokens to " << o.out << "\n";
  return kExitOk;
}

int cmd_bench(BenchOptions o, std::ostream& out) {
  Corpus corpus;
  if (!o.corpus.empty()) {
    Preprocessing pre;
    pre.min_count = 1;
    corpus = load_corpus(o.corpus, pre);
  } else if (o.synthetic_docs > 0) {
    WorldOptions world;
    world.topic_names = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    world.proportions.assign(world.topic_names.size(), 1.0);
    world.words_per_topic = 500;
    world.num_documents = o.synthetic_docs;
    world.mean_length = o.mean_length;
    Rng rng = make_stream(o.config.rng_seed, 0x62656e6368);
    corpus = generate_synthetic(make_world(world), rng).corpus;
  } else {
    throw ConfigError("bench needs --corpus or --synthetic-docs");
  }
  if (o.reps < 1) throw ConfigError("--reps must be >= 1");

  out << "# bench: documents=" << corpus.num_documents() << " tokens=" << corpus.total_tokens
      << " max_iter=" << o.config.max_iter << " batch_size=" << o.config.batch_size << " alpha=" << o.config.alpha
      << " beta=" << o.config.beta << " gamma=" << o.config.gamma << " nu=" << o.config.nu << " reps=" << o.reps
      << "\n";
  std::ofstream file;
  if (!o.out.empty()) {
    file = open_output(o.out);
    file << "workers\tk\treps\tmean_seconds\n";
  }
  out << std::setw(8) << "workers" << std::setw(6) << "k" << std::setw(14) << "mean_seconds" << "\n";
  const SeedAssignment no_seeds;
  for (int k : o.topics) {
    for (int e : o.workers) {
      ModelConfig c = o.config;
      c.num_topics = k;
      c.workers = e;
      c.auto_stop = false;
      c.validate(0);
      double total = 0.0;
      for (int r = 0; r < o.reps; ++r) {
        c.rng_seed = o.config.rng_seed + static_cast<std::uint64_t>(r);
        total += fit(corpus, c, no_seeds).report.elapsed_seconds;
      }
      const double mean = total / o.reps;
      out << std::setw(8) << e << std::setw(6) << k << std::setw(14) << std::fixed << std::setprecision(3) << mean
          << std::defaultfloat << "\n";
      if (file.is_open()) file << e << '\t' << k << '\t' << o.reps << '\t' << mean << '\n';
    }
  }
  return kExitOk;
}

void add_model_config(CLI::App* cmd, ModelConfig& c) {
  cmd->add_option("--alpha", c.alpha, "initial symmetric document-topic prior")->capture_default_str();
  cmd->add_option("--beta", c.beta, "symmetric topic-word prior")->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "sequential sampling weight in [0, 1]")->capture_default_str();
  cmd->add_option("--nu", c.nu, "Dirichlet prior adjustment strength in [0, 1)")->capture_default_str();
  cmd->add_option("--max-iter", c.max_iter, "maximum number of sweeps (multiple of 10)")->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "fraction of documents per batch")->capture_default_str();
  cmd->add_option("--workers", c.workers, "worker threads (default: $DAA_WORKERS or hardware threads)")
      ->capture_default_str();
  cmd->add_option("--rng-seed", c.rng_seed, "random seed")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed asymmetric allocation topic models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  FitOptions fit_o;
  fit_o.config.workers = default_workers();
  fit_o.config.auto_stop = true;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model to a corpus");
  fit_cmd->add_option("--corpus", fit_o.corpus, "training corpus (JSON lines)")->required();
  fit_cmd->add_option("--model", fit_o.model, "output model file")->required();
  fit_cmd->add_option("--report", fit_o.report, "fit report path (default: <model>.report.json)");
  fit_cmd->add_option("--seeds", fit_o.seeds, "seed dictionary");
  fit_cmd->add_option("--stopwords", fit_o.stopwords, "stop-word file, one term per line");
  fit_cmd->add_option("--min-count", fit_o.min_count, "drop terms with fewer occurrences")->capture_default_str();
  auto* k_opt = fit_cmd->add_option("--k", fit_o.config.num_topics, "total number of topics (seeded + unseeded)");
  fit_cmd->add_option("--seed-weight", fit_o.config.seed_weight, "seed pseudo-count scale w (cell = w N / V)")
      ->capture_default_str();
  fit_cmd->add_flag("--auto-stop,!--no-auto-stop", fit_o.config.auto_stop, "stop when the delta statistic rises")
      ->capture_default_str();
  add_model_config(fit_cmd, fit_o.config);

  PredictCliOptions pred_o;
  auto* pred_cmd = app.add_subcommand("predict", "assign topics to unseen documents");
  pred_cmd->add_option("--model", pred_o.model, "model file")->required();
  pred_cmd->add_option("--corpus", pred_o.corpus, "test corpus (JSON lines)")->required();
  pred_cmd->add_option("--out", pred_o.out, "prediction file (default: stdout)");
  pred_cmd->add_option("--predict-iter", pred_o.predict_iter, "Gibbs iterations (default: 100, from the model)");
  pred_cmd->add_flag("--seeded-only-labels", pred_o.seeded_only, "restrict labels to seeded topics");
  pred_cmd->add_option("--rng-seed", pred_o.rng_seed, "random seed (default: the model's)");

  EvaluateOptions eval_o;
  auto* eval_cmd = app.add_subcommand("evaluate", "score predictions: F1, perplexity, topic frequency");
  eval_cmd->add_option("--model", eval_o.model, "model file")->required();
  eval_cmd->add_option("--corpus", eval_o.corpus, "test corpus with gold `label` fields")->required();
  eval_cmd->add_option("--predictions", eval_o.predictions, "output of predict")->required();
  eval_cmd->add_option("--group-by", eval_o.group_by, "metadata key for the frequency table, e.g. meta.year");
  eval_cmd->add_option("--out", eval_o.out, "tab-separated report, one metric per row");

  TermsOptions terms_o;
  auto* terms_cmd = app.add_subcommand("terms", "print the most probable terms of each topic");
  terms_cmd->add_option("--model", terms_o.model, "model file")->required();
  terms_cmd->add_option("--n", terms_o.n, "terms per topic")->capture_default_str()->check(CLI::NonNegativeNumber);
  terms_cmd->add_option("--topic", terms_o.topic, "only this topic label");

  GenerateOptions gen_o;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic labelled corpus");
  gen_cmd->add_option("--out", gen_o.out, "output corpus (JSON lines)")->required();
  gen_cmd->add_option("--seeds-out", gen_o.seeds_out, "write a matching seed dictionary");
  gen_cmd->add_option("--topics", gen_o.topics, "topic names")->delimiter(',')->capture_default_str();
  gen_cmd->add_option("--proportions", gen_o.proportions, "topic frequencies (normalized)")
      ->delimiter(',')
      ->capture_default_str();
  gen_cmd->add_option("--docs", gen_o.world.num_documents, "number of sentences")->capture_default_str();
  gen_cmd->add_option("--mean-length", gen_o.world.mean_length, "mean tokens per sentence")->capture_default_str();
  gen_cmd->add_option("--chain-length", gen_o.world.chain_length, "sentences per parent document")
      ->capture_default_str();
  gen_cmd->add_option("--persistence", gen_o.world.persistence, "chance a sentence keeps the previous topic")
      ->capture_default_str();
  gen_cmd->add_option("--words-per-topic", gen_o.world.words_per_topic, "own terms per topic")->capture_default_str();
  gen_cmd->add_option("--shared-words", gen_o.world.shared_words, "terms shared by all topics")->capture_default_str();
  gen_cmd->add_option("--shared-weight", gen_o.world.shared_weight, "mass on shared terms")->capture_default_str();
  gen_cmd->add_option("--background-words", gen_o.world.background_words, "generic terms per theme")
      ->capture_default_str();
  gen_cmd->add_option("--background-themes", gen_o.world.background_themes, "number of generic themes")
      ->capture_default_str();
  gen_cmd->add_option("--background-weight", gen_o.world.background_weight, "token share of generic terms")
      ->capture_default_str();
  gen_cmd->add_option("--leak", gen_o.world.leak, "mass each topic spreads over other topics' terms")
      ->capture_default_str();
  gen_cmd->add_option("--vague", gen_o.world.vague, "share of documents using only shared terms")
      ->capture_default_str();
  gen_cmd->add_option("--focus", gen_o.world.focus, "token share of the dominant topic")->capture_default_str();
  gen_cmd->add_option("--seeds-per-topic", gen_o.seeds_per_topic, "seed words per topic")->capture_default_str();
  gen_cmd->add_option("--years", gen_o.num_years, "spread parent documents over this many years (meta.year)");
  gen_cmd->add_option("--first-year", gen_o.first_year, "first year")->capture_default_str();
  gen_cmd->add_option("--rng-seed", gen_o.rng_seed, "random seed")->capture_default_str();

  BenchOptions bench_o;
  bench_o.config.max_iter = 100;
  bench_o.config.gamma = 0.25;
  bench_o.config.workers = 1;
  auto* bench_cmd = app.add_subcommand("bench", "time fits over a grid of worker counts and topic numbers");
  bench_cmd->add_option("--corpus", bench_o.corpus, "corpus to fit (JSON lines)");
  bench_cmd->add_option("--synthetic-docs", bench_o.synthetic_docs, "generate a corpus of this many documents");
  bench_cmd->add_option("--mean-length", bench_o.mean_length, "mean length of generated documents")
      ->capture_default_str();
  bench_cmd->add_option("--workers-grid", bench_o.workers, "worker counts")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--k-grid", bench_o.topics, "topic numbers")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--reps", bench_o.reps, "repetitions per cell")->capture_default_str();
  bench_cmd->add_option("--out", bench_o.out, "tab-separated timing table");
  add_model_config(bench_cmd, bench_o.config);

  std::vector<std::string> argv_store{"daa"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    fit_o.k_given = k_opt->count() > 0;
    if (*fit_cmd) return cmd_fit(fit_o, out);
    if (*pred_cmd) return cmd_predict(pred_o, out);
    if (*eval_cmd) return cmd_evaluate(eval_o, out);
    if (*terms_cmd) return cmd_terms(terms_o, out);
    if (*gen_cmd) return cmd_generate(gen_o, out);
    if (*bench_cmd) return cmd_bench(bench_o, out);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace daa
