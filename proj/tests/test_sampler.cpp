#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "bitopic/bitopic.hpp"
#include "support/oracles.hpp"
#include "support/toy_corpus.hpp"

using namespace bitopic;

namespace {

constexpr ModelKind kAllKinds[] = {ModelKind::Bilda, ModelKind::Seg, ModelKind::LambdaBilda,
                                   ModelKind::LambdaSeg};

ModelConfig small_config(ModelKind kind, int32_t topics = 3, uint64_t seed = 42) {
  ModelConfig cfg;
  cfg.kind = kind;
  cfg.topics = topics;
  cfg.seed = seed;
  cfg.train_iters = 5;
  cfg.infer_iters = 10;
  return cfg;
}

double row_sum(const double* row, int32_t n) {
  double s = 0.0;
  for (int32_t k = 0; k < n; ++k) s += row[k];
  return s;
}

}  // namespace

TEST_CASE("config validation and the 1/K alpha default") {
  ModelConfig cfg;
  cfg.topics = 25;
  cfg.resolve_defaults();
  CHECK(cfg.alpha == 0.04);
  CHECK_NOTHROW(cfg.validate());

  ModelConfig bad = cfg;
  bad.topics = 1;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.alpha = -0.1;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.beta = 0.0;
  CHECK_THROWS(bad.validate());
  bad = cfg;
  bad.train_iters = 0;
  CHECK_THROWS(bad.validate());

  ModelConfig keep;
  keep.topics = 4;
  keep.alpha = 0.7;
  keep.resolve_defaults();
  CHECK(keep.alpha == 0.7);
}

TEST_CASE("initialization is deterministic and conserves counts") {
  Rng rng(3);
  Corpus c = oracles::random_corpus(rng, 10, 8, 6, 4, 12, 3);
  std::vector<double> lams(c.pairs.size(), 0.6);

  for (ModelKind kind : kAllKinds) {
    ModelConfig cfg = small_config(kind);
    const auto* lp = uses_lambda(kind) ? &lams : nullptr;
    ModelState a = initialize(c, cfg, lp);
    ModelState b = initialize(c, cfg, lp);
    CHECK(a == b);
    CHECK(oracles::counts_match_assignments(a, c));
    CHECK(oracles::omega_totals_match(a, c));

    int64_t psi_total = 0;
    for (int lang = 0; lang < 2; ++lang) {
      for (int64_t k = 0; k < a.psi(lang).rows(); ++k) {
        for (int64_t w = 0; w < a.psi(lang).cols(); ++w) psi_total += a.psi(lang)[k][w];
      }
    }
    CHECK(psi_total == c.total_words(0) + c.total_words(1));
  }
}

TEST_CASE("lambda bookkeeping errors") {
  Rng rng(5);
  Corpus c = oracles::random_corpus(rng, 8, 8, 4, 4, 9, 1);
  std::vector<double> lams(c.pairs.size(), 0.5);

  // Lambda model without lambdas anywhere.
  CHECK_THROWS_WITH(initialize(c, small_config(ModelKind::LambdaBilda)),
                    Catch::Matchers::ContainsSubstring("lambda"));
  // Plain model with an explicit lambda vector.
  CHECK_THROWS(initialize(c, small_config(ModelKind::Bilda), &lams));
  // Wrong size.
  std::vector<double> wrong(c.pairs.size() + 1, 0.5);
  CHECK_THROWS(initialize(c, small_config(ModelKind::LambdaSeg), &wrong));
  // Out of range.
  std::vector<double> out_of_range(c.pairs.size(), 1.5);
  CHECK_THROWS(initialize(c, small_config(ModelKind::LambdaSeg), &out_of_range));

  // Pair-carried lambdas work without an explicit vector.
  Corpus with = c;
  for (auto& p : with.pairs) p.lambda = 0.25;
  CHECK_NOTHROW(initialize(with, small_config(ModelKind::LambdaBilda)));
}

TEST_CASE("sweeps preserve counts and are deterministic") {
  Rng rng(9);
  Corpus c = oracles::random_corpus(rng, 12, 10, 8, 5, 15, 3);
  std::vector<double> lams(c.pairs.size(), 0.4);

  for (ModelKind kind : kAllKinds) {
    ModelConfig cfg = small_config(kind, 4);
    const auto* lp = uses_lambda(kind) ? &lams : nullptr;
    ModelState a = initialize(c, cfg, lp);
    ModelState b = a;
    for (int it = 0; it < 10; ++it) {
      gibbs_sweep(a, c);
      gibbs_sweep(b, c);
    }
    CHECK(a == b);
    CHECK(oracles::counts_match_assignments(a, c));
    CHECK(oracles::omega_totals_match(a, c));
  }
}

TEST_CASE("estimates are smoothed probability distributions") {
  toy::GeneratedCorpus g = toy::generate_shared(31, 3, 30, 20, 30, 3);
  std::vector<double> lams(g.corpus.pairs.size(), 0.5);

  for (ModelKind kind : kAllKinds) {
    ModelConfig cfg = small_config(kind);
    TrainResult tr = train(g.corpus, cfg, uses_lambda(kind) ? &lams : nullptr);
    const TopicEstimates& est = tr.estimates;
    CHECK(est.shared_theta == !uses_lambda(kind));
    for (int lang = 0; lang < 2; ++lang) {
      for (int64_t k = 0; k < est.phi(lang).rows(); ++k) {
        CHECK(row_sum(est.phi(lang)[k], static_cast<int32_t>(est.phi(lang).cols())) ==
              Catch::Approx(1.0).margin(1e-9));
        for (int64_t w = 0; w < est.phi(lang).cols(); ++w) CHECK(est.phi(lang)[k][w] > 0.0);
      }
      for (int64_t i = 0; i < est.theta(lang).rows(); ++i) {
        CHECK(row_sum(est.theta(lang)[i], cfg.topics) == Catch::Approx(1.0).margin(1e-9));
        for (int32_t k = 0; k < cfg.topics; ++k) CHECK(est.theta(lang)[i][k] > 0.0);
      }
    }
    if (est.shared_theta) {
      for (int64_t i = 0; i < est.theta_l1.rows(); ++i) {
        for (int32_t k = 0; k < cfg.topics; ++k)
          CHECK(est.theta_l1[i][k] == est.theta_l2[i][k]);
      }
    }
  }
}

TEST_CASE("all-zero counters give a uniform theta") {
  const int32_t omega_row[3] = {0, 0, 0};
  double out[3];
  shared_theta_row(omega_row, 3, 0.5, out);
  for (double x : out) CHECK(x == Catch::Approx(1.0 / 3.0).margin(1e-15));
  lambda_theta_row(omega_row, omega_row, 3, 0.7, 0.5, out);
  for (double x : out) CHECK(x == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("lambda=1 theta equals the shared-counter theta exactly") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int32_t topics = 2 + static_cast<int32_t>(rng.uniform_int(6));
    std::vector<int32_t> self(static_cast<std::size_t>(topics)), other(self.size()),
        joint(self.size());
    for (int32_t k = 0; k < topics; ++k) {
      self[static_cast<std::size_t>(k)] = static_cast<int32_t>(rng.uniform_int(50));
      other[static_cast<std::size_t>(k)] = static_cast<int32_t>(rng.uniform_int(50));
      joint[static_cast<std::size_t>(k)] =
          self[static_cast<std::size_t>(k)] + other[static_cast<std::size_t>(k)];
    }
    std::vector<double> bound(static_cast<std::size_t>(topics)), shared(bound.size());
    lambda_theta_row(self.data(), other.data(), topics, 1.0, 0.5, bound.data());
    shared_theta_row(joint.data(), topics, 0.5, shared.data());
    for (int32_t k = 0; k < topics; ++k)
      CHECK(bound[static_cast<std::size_t>(k)] == shared[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("held-out inference is deterministic and thread-invariant") {
  toy::GeneratedCorpus g = toy::generate_shared(77, 3, 30, 30, 40, 1);
  auto [train_c, held] = toy::split_tail(g.corpus, 8);
  ModelConfig cfg = small_config(ModelKind::Bilda);
  cfg.train_iters = 20;
  TrainResult tr = train(train_c, cfg);

  for (InferMode mode : {InferMode::Paired, InferMode::Unpaired}) {
    HeldoutTheta one = infer_heldout(tr.state, held, mode, 1234, 15, 1);
    HeldoutTheta four = infer_heldout(tr.state, held, mode, 1234, 15, 4);
    HeldoutTheta again = infer_heldout(tr.state, held, mode, 1234, 15, 1);
    CHECK(one.theta_l1 == four.theta_l1);
    CHECK(one.theta_l2 == four.theta_l2);
    CHECK(one.theta_l1 == again.theta_l1);
    CHECK(one.theta_l2 == again.theta_l2);
    for (int64_t i = 0; i < one.theta_l1.rows(); ++i) {
      CHECK(row_sum(one.theta_l1[i], cfg.topics) == Catch::Approx(1.0).margin(1e-9));
      CHECK(row_sum(one.theta_l2[i], cfg.topics) == Catch::Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("unpaired inference never reads the other language") {
  toy::GeneratedCorpus g = toy::generate_shared(78, 3, 30, 30, 40, 1);
  auto [train_c, held] = toy::split_tail(g.corpus, 8);
  ModelConfig cfg = small_config(ModelKind::Bilda);
  cfg.train_iters = 20;
  TrainResult tr = train(train_c, cfg);

  Corpus corrupted = held;
  Rng noise(5150);
  for (auto& p : corrupted.pairs) {
    for (auto& w : p.doc_l2.words)
      w = static_cast<int32_t>(noise.uniform_int(static_cast<uint64_t>(corrupted.vocab_l2.size())));
  }

  HeldoutTheta clean = infer_heldout(tr.state, held, InferMode::Unpaired, 99, 15);
  HeldoutTheta dirty = infer_heldout(tr.state, corrupted, InferMode::Unpaired, 99, 15);
  CHECK(clean.theta_l1 == dirty.theta_l1);       // bitwise: l1 never saw l2
  CHECK(!(clean.theta_l2 == dirty.theta_l2));    // l2 itself did change
}

TEST_CASE("paired inference treats a missing held-out lambda as zero") {
  toy::GeneratedCorpus g = toy::generate_comparable(79, 3, 30, 30, 40, 1, 0.3);
  auto [train_c, held] = toy::split_tail(g.corpus, 6);
  ModelConfig cfg = small_config(ModelKind::LambdaBilda);
  cfg.train_iters = 20;
  TrainResult tr = train(train_c, cfg);

  Corpus no_lambda = held;
  for (auto& p : no_lambda.pairs) p.lambda.reset();
  Corpus zero_lambda = held;
  for (auto& p : zero_lambda.pairs) p.lambda = 0.0;

  HeldoutTheta a = infer_heldout(tr.state, no_lambda, InferMode::Paired, 7, 10);
  HeldoutTheta b = infer_heldout(tr.state, zero_lambda, InferMode::Paired, 7, 10);
  CHECK(a.theta_l1 == b.theta_l1);
  CHECK(a.theta_l2 == b.theta_l2);
}

TEST_CASE("empty held-out documents stay uniform and are flagged") {
  toy::GeneratedCorpus g = toy::generate_shared(80, 3, 30, 20, 30, 1);
  auto [train_c, held] = toy::split_tail(g.corpus, 4);
  ModelConfig cfg = small_config(ModelKind::Bilda);
  TrainResult tr = train(train_c, cfg);

  held.pairs[1].doc_l2 = Document{{}, {0}, {0}};
  for (InferMode mode : {InferMode::Paired, InferMode::Unpaired}) {
    HeldoutTheta t = infer_heldout(tr.state, held, mode, 3, 5);
    CHECK(t.empty_l2[1] == 1);
    CHECK(t.empty_l1[1] == 0);
    for (int32_t k = 0; k < cfg.topics; ++k)
      CHECK(t.theta_l2[1][k] == Catch::Approx(1.0 / 3.0).margin(1e-12));
  }
}

TEST_CASE("held-out corpus must match the training vocabularies") {
  toy::GeneratedCorpus g = toy::generate_shared(81, 3, 30, 12, 20, 1);
  ModelConfig cfg = small_config(ModelKind::Bilda);
  TrainResult tr = train(g.corpus, cfg);
  Corpus other = toy::generate_shared(81, 3, 31, 4, 20, 1).corpus;
  CHECK_THROWS_WITH(infer_heldout(tr.state, other, InferMode::Paired, 1),
                    Catch::Matchers::ContainsSubstring("vocabulary"));
}

TEST_CASE("paired inference recovers a training pair's theta") {
  toy::GeneratedCorpus g = toy::generate_shared(82, 5, 50, 60, 60, 1, 0.3);
  ModelConfig cfg = small_config(ModelKind::Bilda, 5);
  cfg.train_iters = 60;
  TrainResult tr = train(g.corpus, cfg);

  Corpus echo = g.corpus;
  echo.pairs.assign(g.corpus.pairs.begin(), g.corpus.pairs.begin() + 5);
  HeldoutTheta inferred = infer_heldout(tr.state, echo, InferMode::Paired, cfg.seed, 60);
  for (int64_t i = 0; i < echo.pair_count(); ++i) {
    const double tv =
        oracles::total_variation(inferred.theta_l1[i], tr.estimates.theta_l1[i], cfg.topics);
    CHECK(tv <= 0.1);
  }
}

TEST_CASE("model serialization round-trips exactly for every kind") {
  Rng rng(55);
  Corpus c = oracles::random_corpus(rng, 14, 11, 6, 5, 14, 3);
  for (auto& p : c.pairs) p.lambda = 0.3;

  for (ModelKind kind : kAllKinds) {
    ModelConfig cfg = small_config(kind);
    TrainResult tr = train(c, cfg);
    ModelArtifact art{tr.state, c.vocab_l1, c.vocab_l2};

    std::ostringstream first;
    save_model(art, first);
    std::istringstream in(first.str());
    ModelArtifact back = load_model(in);
    std::ostringstream second;
    save_model(back, second);
    CHECK(first.str() == second.str());
    CHECK(back.state == tr.state);
    CHECK(back.vocab_l1.id_to_token == c.vocab_l1.id_to_token);
    CHECK(back.vocab_l2.frequency == c.vocab_l2.frequency);

    // The reloaded state keeps sampling identically to the original.
    ModelState resumed = back.state;
    ModelState original = tr.state;
    gibbs_sweep(resumed, c);
    gibbs_sweep(original, c);
    CHECK(resumed == original);
  }
}

TEST_CASE("model loader rejects garbage") {
  std::istringstream bad("bitopic-model 999\n");
  CHECK_THROWS(load_model(bad));
  std::istringstream empty("");
  CHECK_THROWS(load_model(empty));
}

TEST_CASE("top topic words order by probability then id") {
  Matrix<double> phi(1, 4, 0.0);
  phi[0][0] = 0.2;
  phi[0][1] = 0.4;
  phi[0][2] = 0.2;
  phi[0][3] = 0.2;
  auto top = top_topic_words(phi, 0, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0] == 1);
  CHECK(top[1] == 0);  // tie at 0.2 broken by id
  CHECK(top[2] == 2);
  CHECK(top_topic_words(phi, 0, 9).size() == 4);  // capped at V
}
