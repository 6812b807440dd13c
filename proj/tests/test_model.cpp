#include <doctest.h>

#include <numeric>

#include "daa/error.hpp"
#include "daa/model.hpp"
#include "daa/sampler.hpp"
#include "helpers.hpp"

using namespace daa;

namespace {

// A hand-built state: document-topic rows, topic-word counts and priors set
// directly. Document lengths follow the rows.
ModelState blank_state(int k_count, int v_count, const std::vector<std::vector<int>>& rows,
                       std::vector<double> alpha, double beta) {
  ModelState s;
  s.config.num_topics = k_count;
  s.config.beta = beta;
  std::vector<std::string> terms;
  for (int v = 0; v < v_count; ++v) terms.push_back(std::string(1, static_cast<char>('a' + v)));
  s.vocabulary = Vocabulary(terms);
  s.counts = TopicWordCounts(k_count, v_count);
  s.seed_counts.assign(static_cast<std::size_t>(k_count * v_count), 0.0);
  s.refresh_seed_total();
  s.alpha = std::move(alpha);
  s.eps.assign(static_cast<std::size_t>(k_count), 0.0);
  s.doc_offset = {0};
  for (const auto& row : rows) {
    s.doc_topic.insert(s.doc_topic.end(), row.begin(), row.end());
    s.doc_offset.push_back(s.doc_offset.back() + std::accumulate(row.begin(), row.end(), 0));
    s.predecessor.push_back(-1);
  }
  return s;
}

void set_seed(ModelState& s, int k, int v, double x) {
  s.seed_counts[static_cast<std::size_t>(v) * s.num_topics() + k] = x;
  s.refresh_seed_total();
}

double sum(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0); }

}  // namespace

TEST_CASE("theta") {
  SUBCASE("counts plus prior") {
    const auto s = blank_state(2, 1, {{3, 1}}, {0.5, 0.5}, 0.1);
    const auto t = theta(s, 0);
    CHECK(t[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(t[1] == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("empty document gives the normalized prior") {
    const auto s = blank_state(2, 1, {{0, 0}}, {0.5, 0.5}, 0.1);
    CHECK(theta(s, 0) == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("asymmetric prior") {
    const auto s = blank_state(3, 1, {{2, 0, 0}}, {0.9, 0.3, 0.3}, 0.1);
    const auto t = theta(s, 0);
    CHECK(t[0] == doctest::Approx(2.9 / 3.5).epsilon(1e-14));
    CHECK(t[1] == doctest::Approx(0.3 / 3.5).epsilon(1e-14));
    CHECK(t[2] == doctest::Approx(0.3 / 3.5).epsilon(1e-14));
  }
}

TEST_CASE("phi") {
  SUBCASE("counts plus beta") {
    auto s = blank_state(1, 2, {}, {0.5}, 0.1);
    s.counts.add(0, 0, 4);
    const auto p = phi(s, 0);
    CHECK(p[0] == doctest::Approx(4.1 / 4.2).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.1 / 4.2).epsilon(1e-15));
  }
  SUBCASE("empty row is uniform") {
    const auto s = blank_state(2, 5, {}, {0.5, 0.5}, 0.3);
    for (double x : phi(s, 1)) CHECK(x == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("seed pseudo-counts are part of the row") {
    auto s = blank_state(1, 2, {}, {0.5}, 0.5);
    set_seed(s, 0, 0, 2.0);
    s.counts.add(0, 1, 1);
    const auto p = phi(s, 0);
    CHECK(p[0] == doctest::Approx(2.5 / 4.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(1.5 / 4.0).epsilon(1e-15));
  }
}

TEST_CASE("sampling_weights") {
  SUBCASE("symmetric empty state gives equal weights") {
    const auto s = blank_state(2, 3, {{0, 0}}, {0.5, 0.5}, 0.5);
    const auto w = sampling_weights(s, 0, 1);
    CHECK(w[0] == w[1]);
    CHECK(w[0] > 0.0);
  }
  SUBCASE("hand-computed leave-one-out weights") {
    auto s = blank_state(2, 2, {{1, 0}}, {0.5, 0.5}, 0.5);
    s.counts.add(0, 0, 2);
    s.counts.add(0, 1, 2);
    s.counts.add(1, 1, 4);
    const auto w = sampling_weights(s, 0, 0);
    CHECK(w[0] == doctest::Approx(1.5 * (2.5 / 5.0)).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.5 * (0.5 / 5.0)).epsilon(1e-15));
    CHECK(w[0] == doctest::Approx(0.75));
    CHECK(w[1] == doctest::Approx(0.05));
  }
  SUBCASE("sequential prior from the predecessor") {
    // predecessor with theta -> [1, 0] in the limit; use a row that makes it exact
    auto s = blank_state(2, 2, {{0, 0}, {0, 0}}, {0.5, 0.5}, 0.5);
    s.config.gamma = 0.5;
    s.predecessor[1] = 0;
    // theta(prev) = [0.5, 0.5] for an empty predecessor
    auto a = document_prior(s, 1);
    CHECK(a[0] == doctest::Approx(0.5 + 0.5 * 0.5 * 1.0));
    CHECK(a[1] == doctest::Approx(0.5 + 0.5 * 0.5 * 1.0));
    // a long one-topic predecessor drives pi towards [1, 0]
    auto t = blank_state(2, 2, {{1000000, 0}, {0, 0}}, {0.5, 0.5}, 0.5);
    t.config.gamma = 0.5;
    t.predecessor[1] = 0;
    a = document_prior(t, 1);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(a[1] == doctest::Approx(0.5).epsilon(1e-6));
    // exact form: alpha_k + gamma * theta(prev)_k * sum(alpha)
    const auto pi = theta(t, 0);
    CHECK(a[0] == 0.5 + 0.5 * pi[0] * 1.0);
    CHECK(a[1] == 0.5 + 0.5 * pi[1] * 1.0);
  }
  SUBCASE("gamma zero or first sentence ignores the chain") {
    auto s = blank_state(2, 2, {{3, 0}, {0, 0}}, {0.5, 0.5}, 0.5);
    s.predecessor[1] = 0;
    CHECK(document_prior(s, 1) == s.alpha);
    s.config.gamma = 1.0;
    CHECK(document_prior(s, 0) == s.alpha);
  }
}

TEST_CASE("theta and phi are positive distributions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 8);
    const int v = 1 + static_cast<int>(rng() % 20);
    std::vector<std::vector<int>> rows(3, std::vector<int>(static_cast<std::size_t>(k)));
    for (auto& r : rows) {
      for (auto& x : r) x = static_cast<int>(rng() % 5);
    }
    std::vector<double> alpha(static_cast<std::size_t>(k));
    for (auto& a : alpha) a = 0.01 + static_cast<double>(rng() % 100) / 50.0;
    auto s = blank_state(k, v, rows, alpha, 0.01 + static_cast<double>(rng() % 10) / 10.0);
    for (int i = 0; i < 30; ++i) s.counts.add(static_cast<int>(rng() % k), static_cast<int>(rng() % v), 1);
    set_seed(s, 0, 0, 0.37);
    for (int d = 0; d < 3; ++d) {
      const auto t = theta(s, d);
      CHECK(std::abs(sum(t) - 1.0) <= 1e-12);
      for (double x : t) CHECK(x > 0.0);
    }
    for (int kk = 0; kk < k; ++kk) {
      const auto p = phi(s, kk);
      CHECK(std::abs(sum(p) - 1.0) <= 1e-12);
      for (double x : p) CHECK(x > 0.0);
    }
  }
}

TEST_CASE("sampling_weights commute with topic permutation under symmetric priors") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 4;
    const int v = 6;
    std::vector<int> row(k);
    for (auto& x : row) x = static_cast<int>(rng() % 4);
    auto s = blank_state(k, v, {row}, std::vector<double>(k, 0.5), 0.1);
    for (int i = 0; i < 40; ++i) s.counts.add(static_cast<int>(rng() % k), static_cast<int>(rng() % v), 1);
    std::vector<int> perm{2, 0, 3, 1};  // new topic index of old topic k is perm[k]
    std::vector<int> prow(k);
    for (int kk = 0; kk < k; ++kk) prow[perm[kk]] = row[kk];
    auto p = blank_state(k, v, {prow}, std::vector<double>(k, 0.5), 0.1);
    for (int w = 0; w < v; ++w) {
      for (int kk = 0; kk < k; ++kk) p.counts.add(perm[kk], w, s.counts.at(kk, w));
    }
    for (int w = 0; w < v; ++w) {
      const auto a = sampling_weights(s, 0, w);
      const auto b = sampling_weights(p, 0, w);
      for (int kk = 0; kk < k; ++kk) CHECK(a[kk] == b[perm[kk]]);
    }
  }
}

TEST_CASE("top_terms") {
  auto s = blank_state(2, 3, {}, {0.5, 0.5}, 1e-9);
  s.counts.add(0, 0, 5);
  s.counts.add(0, 1, 3);
  s.counts.add(0, 2, 2);
  const auto top = top_terms(s, 0, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].first == "a");
  CHECK(top[0].second == doctest::Approx(0.5));
  CHECK(top[1].first == "b");
  CHECK(top[1].second == doctest::Approx(0.3));

  s.counts.add(1, 0, 4);
  s.counts.add(1, 1, 4);
  s.counts.add(1, 2, 2);
  const auto tie = top_terms(s, 1, 3);
  CHECK(tie[0].first == "a");
  CHECK(tie[1].first == "b");
  CHECK(tie[2].first == "c");
  CHECK(top_terms(s, 0, 10).size() == 3);
  CHECK(top_terms(s, 0, 0).empty());
}

TEST_CASE("ModelConfig validation") {
  ModelConfig c;
  c.num_topics = 3;
  CHECK_NOTHROW(c.validate(3));
  CHECK_THROWS_AS(c.validate(4), ConfigError);
  auto bad = [&](auto mutate) {
    ModelConfig x = c;
    mutate(x);
    CHECK_THROWS_AS(x.validate(0), ConfigError);
  };
  bad([](ModelConfig& x) { x.num_topics = 0; });
  bad([](ModelConfig& x) { x.alpha = 0.0; });
  bad([](ModelConfig& x) { x.beta = -1.0; });
  bad([](ModelConfig& x) { x.gamma = 1.5; });
  bad([](ModelConfig& x) { x.nu = 1.0; });
  bad([](ModelConfig& x) { x.nu = -0.1; });
  bad([](ModelConfig& x) { x.seed_weight = -1.0; });
  bad([](ModelConfig& x) { x.max_iter = 15; });
  bad([](ModelConfig& x) { x.max_iter = 0; });
  bad([](ModelConfig& x) { x.batch_size = 0.0; });
  bad([](ModelConfig& x) { x.batch_size = 1.5; });
  bad([](ModelConfig& x) { x.workers = 0; });
  bad([](ModelConfig& x) { x.predict_iter = 0; });
}

TEST_CASE("decrement then increment restores the state bit-exactly") {
  const Corpus corpus = test::random_corpus(9, 20, 15, 8, 3);
  ModelConfig c;
  c.num_topics = 5;
  c.gamma = 0.5;
  SeedAssignment seeds;
  seeds.labels = {"s"};
  seeds.topic_words = {{0, 1}};
  Rng rng = make_stream(1, kInitStream);
  ModelState s = initialize(corpus, c, seeds, rng);
  const auto before = fingerprint(s);
  const int k_count = s.num_topics();
  for (int d = 0; d < corpus.num_documents(); ++d) {
    for (std::int64_t i = s.doc_offset[d]; i < s.doc_offset[d + 1]; ++i) {
      const int v = corpus.documents[d].word_ids[static_cast<std::size_t>(i - s.doc_offset[d])];
      const int k = s.z[static_cast<std::size_t>(i)];
      --s.doc_topic[static_cast<std::size_t>(d) * k_count + k];
      s.counts.add(k, v, -1);
      ++s.doc_topic[static_cast<std::size_t>(d) * k_count + k];
      s.counts.add(k, v, 1);
    }
  }
  CHECK(fingerprint(s) == before);
  CHECK_NOTHROW(check_consistency(s, corpus));
}

TEST_CASE("check_consistency detects drift") {
  const Corpus corpus = test::random_corpus(4, 10, 6, 5);
  ModelConfig c;
  c.num_topics = 3;
  Rng rng = make_stream(2, kInitStream);
  ModelState s = initialize(corpus, c, {}, rng);
  CHECK_NOTHROW(check_consistency(s, corpus));
  ModelState broken = s;
  broken.counts.add(0, 0, 1);
  CHECK_THROWS_AS(check_consistency(broken, corpus), Error);
  broken = s;
  broken.doc_topic[0] += 1;
  CHECK_THROWS_AS(check_consistency(broken, corpus), Error);
}

TEST_CASE("fingerprint sees every field") {
  const Corpus corpus = test::random_corpus(4, 10, 6, 5);
  ModelConfig c;
  c.num_topics = 3;
  Rng rng = make_stream(2, kInitStream);
  const ModelState s = initialize(corpus, c, {}, rng);
  const auto base = fingerprint(s);
  ModelState t = s;
  t.alpha[1] = std::nextafter(t.alpha[1], 1.0);
  CHECK(fingerprint(t) != base);
  t = s;
  t.z[0] = (t.z[0] + 1) % 3;
  CHECK(fingerprint(t) != base);
  t = s;
  t.seed_counts[0] = 1e-300;
  CHECK(fingerprint(t) != base);
}
