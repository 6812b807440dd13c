#include <doctest.h>

#include <numeric>
#include <set>

#include "daa/error.hpp"
#include "daa/parallel.hpp"
#include "daa/sampler.hpp"
#include "helpers.hpp"

using namespace daa;

namespace {

Corpus flat_corpus(int d) {
  std::vector<std::vector<int>> docs(static_cast<std::size_t>(d), std::vector<int>{0});
  return test::make_corpus(docs, 1);
}

ModelConfig config(int k) {
  ModelConfig c;
  c.num_topics = k;
  return c;
}

}  // namespace

TEST_CASE("partition") {
  SUBCASE("exact division") {
    const auto plan = partition(flat_corpus(1000), 0.01, 4);
    REQUIRE(plan.batches.size() == 100);
    for (const auto& b : plan.batches) CHECK(b.size() == 10);
    for (std::size_t i = 0; i < 100; ++i) CHECK(plan.worker_of_batch[i] == static_cast<int>(i % 4));
    CHECK_NOTHROW(validate_plan(plan, flat_corpus(1000)));
  }
  SUBCASE("one batch") {
    const auto plan = partition(flat_corpus(37), 1.0, 3);
    REQUIRE(plan.batches.size() == 1);
    CHECK(plan.batches[0].size() == 37);
    CHECK(plan.worker_of_batch[0] == 0);
    CHECK(plan.worker_documents(1).empty());
  }
  SUBCASE("batches larger than the corpus") {
    const auto plan = partition(flat_corpus(3), 0.01, 2);
    std::size_t covered = 0;
    for (const auto& b : plan.batches) covered += b.size();
    CHECK(covered == 3);
    CHECK_NOTHROW(validate_plan(plan, flat_corpus(3)));
  }
  SUBCASE("a chain straddling a boundary moves with its head") {
    // 10 documents, batches of 5; a chain of 3 starts at index 4
    std::vector<std::string> parents(10);
    parents[4] = parents[5] = parents[6] = "speech";
    const Corpus c = test::make_corpus(std::vector<std::vector<int>>(10, {0}), 1, parents);
    const auto plan = partition(c, 0.5, 2);
    CHECK_NOTHROW(validate_plan(plan, c));
    int holder = -1;
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
      for (int d : plan.batches[b]) {
        if (d >= 4 && d <= 6) {
          if (holder < 0) holder = static_cast<int>(b);
          CHECK(holder == static_cast<int>(b));
        }
      }
    }
  }
  SUBCASE("random chained corpora always give valid plans") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Corpus c = test::random_corpus(seed, 50 + static_cast<int>(seed) * 7, 5, 3, 1 + static_cast<int>(seed % 6));
      for (double bs : {0.01, 0.05, 0.3, 1.0}) {
        for (int e : {1, 2, 3, 8}) CHECK_NOTHROW(validate_plan(partition(c, bs, e), c));
      }
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(partition(flat_corpus(4), 0.0, 1), ConfigError);
    CHECK_THROWS_AS(partition(flat_corpus(4), 1.1, 1), ConfigError);
    CHECK_THROWS_AS(partition(flat_corpus(4), 0.5, 0), ConfigError);
  }
}

TEST_CASE("validate_plan rejects broken plans") {
  const Corpus c = flat_corpus(4);
  auto plan = partition(c, 0.5, 2);
  auto missing = plan;
  missing.batches[1].pop_back();
  CHECK_THROWS_AS(validate_plan(missing, c), Error);
  auto twice = plan;
  twice.batches[1].push_back(0);
  CHECK_THROWS_AS(validate_plan(twice, c), Error);

  std::vector<std::string> parents{"p", "p", "q", "q"};
  const Corpus chained = test::make_corpus(std::vector<std::vector<int>>(4, {0}), 1, parents);
  BatchPlan split;
  split.batches = {{0}, {1, 2, 3}};
  split.worker_of_batch = {0, 1};
  split.workers = 2;
  CHECK_THROWS_AS(validate_plan(split, chained), Error);
}

TEST_CASE("merge") {
  const Corpus corpus = test::make_corpus({{0, 1}, {0, 1}}, 2);
  Rng rng = make_stream(1, kInitStream);
  auto s = initialize(corpus, config(2), {}, rng);
  SUBCASE("cancelling deltas leave the counts unchanged") {
    WorkerDelta a{{{0, 0, 1}, {0, 1, -1}}, {1, -1}, 3};
    WorkerDelta b{{{0, 0, -1}, {0, 1, 1}}, {-1, 1}, 5};
    // make sure the intermediate state cannot go negative
    s.counts.add(1, 0, 1);
    s.counts.add(0, 0, 1);
    const auto shifted = s.counts;
    const std::vector<WorkerDelta> deltas{a, b};
    CHECK(merge(s, deltas) == 8);
    CHECK(s.counts == shifted);
  }
  SUBCASE("single delta is added") {
    const std::int32_t n00 = s.counts.at(0, 0);
    const std::int32_t n10 = s.counts.at(1, 0);
    if (n00 > 0) {
      WorkerDelta a{{{0, 0, -1}, {0, 1, 1}}, {-1, 1}, 1};
      const std::vector<WorkerDelta> deltas{a};
      CHECK(merge(s, deltas) == 1);
      CHECK(s.counts.at(0, 0) == n00 - 1);
      CHECK(s.counts.at(1, 0) == n10 + 1);
    }
  }
  SUBCASE("a count below zero is an internal error") {
    WorkerDelta a{{{0, 0, -100}, {0, 1, 100}}, {-100, 100}, 0};
    const std::vector<WorkerDelta> deltas{a};
    CHECK_THROWS_AS(merge(s, deltas), Error);
  }
}

TEST_CASE("worker_run") {
  const Corpus corpus = test::random_corpus(5, 40, 10, 6, 2);
  Rng init = make_stream(3, kInitStream);
  auto s = initialize(corpus, config(3), {}, init);
  SUBCASE("empty slice") {
    Rng rng = make_stream(3, kSampleStream);
    const auto before = fingerprint(s);
    const auto d = worker_run(s.counts, s, corpus, std::vector<int>{}, 10, rng);
    CHECK(d.n_delta.empty());
    CHECK(d.topic_delta == std::vector<std::int64_t>(3, 0));
    CHECK(d.changed == 0);
    CHECK(fingerprint(s) == before);
  }
  SUBCASE("one worker equals ten serial sweeps") {
    std::vector<int> docs(static_cast<std::size_t>(corpus.num_documents()));
    std::iota(docs.begin(), docs.end(), 0);
    auto serial = s;
    Rng ra = make_stream(3, kSampleStream);
    Rng rb = make_stream(3, kSampleStream);
    const TopicWordCounts snapshot = s.counts;
    const auto delta = worker_run(snapshot, s, corpus, docs, 10, ra);
    std::int64_t last = 0;
    for (int i = 0; i < 10; ++i) last = sweep(serial, corpus, docs, rb);
    CHECK(s.z == serial.z);
    CHECK(s.doc_topic == serial.doc_topic);
    CHECK(delta.changed == last);
    std::vector<WorkerDelta> deltas{delta};
    merge(s, deltas);
    CHECK(s.counts == serial.counts);
    CHECK(std::accumulate(delta.topic_delta.begin(), delta.topic_delta.end(), std::int64_t{0}) == 0);
    for (int k = 0; k < 3; ++k) {
      std::int64_t sum = 0;
      for (const auto& cell : delta.n_delta) {
        if (cell.topic == k) sum += cell.delta;
      }
      CHECK(sum == delta.topic_delta[k]);
    }
  }
}

TEST_CASE("workers sampling disjoint vocabularies do not interact") {
  // first half uses words 0..4, second half 5..9
  std::vector<std::vector<int>> docs;
  std::mt19937_64 g(9);
  for (int d = 0; d < 20; ++d) {
    std::vector<int> w;
    for (int i = 0; i < 6; ++i) w.push_back(static_cast<int>(g() % 5) + (d < 10 ? 0 : 5));
    docs.push_back(w);
  }
  const Corpus corpus = test::make_corpus(docs, 10);
  auto c = config(3);
  c.max_iter = 10;
  c.batch_size = 0.5;
  c.workers = 2;
  const BatchPlan plan = partition(corpus, 0.5, 2);
  REQUIRE(plan.worker_documents(0) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto par = fit(corpus, c, {}, plan);

  // each half sampled on its own against a private copy of the initial counts
  Rng init = make_stream(c.rng_seed, kInitStream);
  const auto start = initialize(corpus, c, {}, init);
  auto state = start;
  TopicWordCounts merged = start.counts;
  for (int e = 0; e < 2; ++e) {
    TopicWordCounts local = start.counts;
    Rng rng = make_stream(c.rng_seed, kSampleStream, static_cast<std::uint64_t>(e));
    const auto mine = plan.worker_documents(e);
    for (int i = 0; i < 10; ++i) sweep(state, corpus, mine, local, rng);
    const int lo = e == 0 ? 0 : 5;
    for (int v = lo; v < lo + 5; ++v) {
      for (int k = 0; k < 3; ++k) merged.add(k, v, local.at(k, v) - start.counts.at(k, v));
    }
  }
  CHECK(par.state.z == state.z);
  CHECK(par.state.counts == merged);
  CHECK_NOTHROW(check_consistency(par.state, corpus));
}

TEST_CASE("fit") {
  const Corpus corpus = test::random_corpus(33, 120, 30, 14, 5);
  SeedAssignment seeds;
  seeds.labels = {"a", "b"};
  seeds.topic_words = {{0, 1, 2}, {3, 4}};
  auto c = config(5);
  c.max_iter = 60;
  c.gamma = 0.5;
  c.nu = 0.3;
  c.seed_weight = 0.5;
  c.batch_size = 0.1;
  SUBCASE("one worker reproduces the serial fit") {
    const auto serial = fit_serial(corpus, c, seeds);
    const auto par = fit(corpus, c, seeds);
    CHECK(fingerprint(par.state) == fingerprint(serial.state));
    CHECK(par.report.delta_history == serial.report.delta_history);
    CHECK(par.report.alpha_trajectory == serial.report.alpha_trajectory);
  }
  SUBCASE("deterministic with several workers") {
    c.workers = 4;
    const auto a = fit(corpus, c, seeds);
    const auto b = fit(corpus, c, seeds);
    CHECK(fingerprint(a.state) == fingerprint(b.state));
    CHECK(a.report.delta_history == b.report.delta_history);
  }
  SUBCASE("conservation and invariants with several workers") {
    c.workers = 3;
    c.max_iter = 10;
    for (int outer = 1; outer <= 4; ++outer) {
      c.max_iter = 10 * outer;
      const auto r = fit(corpus, c, seeds);
      CHECK_NOTHROW(check_consistency(r.state, corpus));
      std::int64_t assigned = 0;
      for (auto n : r.state.counts.topic_total) assigned += n;
      CHECK(assigned == corpus.total_tokens);
      for (auto d : r.report.delta_history) {
        CHECK(d >= 0);
        CHECK(d <= corpus.total_tokens);
      }
      const double sum = std::accumulate(r.state.alpha.begin(), r.state.alpha.end(), 0.0);
      CHECK(std::abs(sum - 5 * 0.5) <= 1e-9 * 5 * 0.5);
    }
  }
  SUBCASE("more workers than batches") {
    c.workers = 16;
    c.batch_size = 0.5;
    const auto r = fit(corpus, c, seeds);
    CHECK_NOTHROW(check_consistency(r.state, corpus));
  }
  SUBCASE("invalid configuration") {
    c.nu = 1.0;
    CHECK_THROWS_AS(fit(corpus, c, seeds), ConfigError);
  }
}
