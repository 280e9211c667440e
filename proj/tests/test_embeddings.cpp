#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "bitopic/bitopic.hpp"
#include "support/scratch.hpp"

using namespace bitopic;

namespace {

// Minimal fixture: vocabularies {cat, dog} / {chat, chien} and one pair whose
// documents are passed in as token index sequences.
struct Fixture {
  Vocabulary vocab_l1;
  Vocabulary vocab_l2;

  Fixture() {
    vocab_l1.language = "l1";
    vocab_l1.add("cat", 4);
    vocab_l1.add("dog", 4);
    vocab_l2.language = "l2";
    vocab_l2.add("chat", 4);
    vocab_l2.add("chien", 4);
  }

  static Document doc(std::vector<int32_t> words) {
    Document d;
    d.words = std::move(words);
    d.sentences = {0, d.word_count()};
    d.segments = singleton_offsets(d.word_count());
    return d;
  }
};

EmbeddingTable table(std::vector<std::pair<std::string, std::vector<double>>> rows) {
  EmbeddingTable t;
  t.dim = static_cast<int32_t>(rows.front().second.size());
  for (auto& [token, vec] : rows) t.vectors.emplace(token, vec);
  return t;
}

}  // namespace

TEST_CASE("embedding file format: header then one row per word") {
  auto d = scratch::dir("emb_format");
  auto path = scratch::write(d / "e.txt", "2 3\ncat 1 0 0\ndog 0 1 0\n");
  EmbeddingTable t = load_embedding_file(path);
  CHECK(t.dim == 3);
  CHECK(t.vectors.size() == 2);
  REQUIRE(t.find("cat") != nullptr);
  CHECK(*t.find("cat") == std::vector<double>{1, 0, 0});
  CHECK(t.find("missing") == nullptr);
}

TEST_CASE("embedding file errors") {
  auto d = scratch::dir("emb_errors");
  CHECK_THROWS_WITH(load_embedding_file((d / "absent.txt").string()),
                    Catch::Matchers::ContainsSubstring("cannot open"));
  auto bad_dim = scratch::write(d / "bad_dim.txt", "1 0\ncat\n");
  CHECK_THROWS_WITH(load_embedding_file(bad_dim),
                    Catch::Matchers::ContainsSubstring("dimension"));
  auto trunc = scratch::write(d / "trunc.txt", "2 2\ncat 1 0\n");
  CHECK_THROWS_WITH(load_embedding_file(trunc), Catch::Matchers::ContainsSubstring("truncated"));
  auto short_row = scratch::write(d / "short.txt", "1 3\ncat 1 0\n");
  CHECK_THROWS_WITH(load_embedding_file(short_row),
                    Catch::Matchers::ContainsSubstring("too few"));
  auto empty = scratch::write(d / "empty.txt", "0 3\n");
  CHECK_THROWS_WITH(load_embedding_file(empty),
                    Catch::Matchers::ContainsSubstring("no vectors"));
}

TEST_CASE("duplicate rows keep the first occurrence and are counted") {
  auto d = scratch::dir("emb_dups");
  auto path = scratch::write(d / "e.txt", "3 2\ncat 1 0\ncat 9 9\ndog 0 1\n");
  int64_t dups = 0;
  EmbeddingTable t = load_embedding_file(path, &dups);
  CHECK(dups == 1);
  CHECK(*t.find("cat") == std::vector<double>{1, 0});
}

TEST_CASE("paired load rejects dimension mismatches") {
  auto d = scratch::dir("emb_dim");
  auto a = scratch::write(d / "a.txt", "1 3\ncat 1 0 0\n");
  auto b = scratch::write(d / "b.txt", "1 2\nchat 1 0\n");
  CHECK_THROWS_WITH(load_embeddings(a, b), Catch::Matchers::ContainsSubstring("mismatch"));
  auto b3 = scratch::write(d / "b3.txt", "1 3\nchat 1 0 0\n");
  CHECK_NOTHROW(load_embeddings(a, b3));
}

TEST_CASE("document vectors are occurrence-weighted means") {
  Fixture f;
  EmbeddingTable t = table({{"cat", {1, 0}}, {"dog", {0, 1}}});

  auto v = doc_vector(Fixture::doc({0, 1}), t, f.vocab_l1);  // [cat, dog]
  REQUIRE(v.has_value());
  CHECK((*v)[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK((*v)[1] == Catch::Approx(0.5).margin(1e-15));

  auto v2 = doc_vector(Fixture::doc({0, 0, 1}), t, f.vocab_l1);  // [cat, cat, dog]
  REQUIRE(v2.has_value());
  CHECK((*v2)[0] == Catch::Approx(2.0 / 3.0).margin(1e-15));
  CHECK((*v2)[1] == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("documents with no embedded words have no vector") {
  Fixture f;
  EmbeddingTable t = table({{"unrelated", {1, 0}}});
  CHECK_FALSE(doc_vector(Fixture::doc({0, 1}), t, f.vocab_l1).has_value());
}

TEST_CASE("cosine basics") {
  CHECK(cosine({1, 0}, {1, 0}) == Catch::Approx(1.0).margin(1e-15));
  CHECK(cosine({1, 0}, {0, 1}) == 0.0);
  CHECK(cosine({1, 0}, {1, 1}) == Catch::Approx(0.7071067811865475).margin(1e-15));
  CHECK(cosine({0, 0}, {1, 1}) == 0.0);  // zero norm falls back to 0
}

TEST_CASE("lambda examples: identical, orthogonal, diagonal, clamped") {
  Fixture f;
  DocumentPair pair;
  pair.doc_l1 = Fixture::doc({0});  // cat
  pair.doc_l2 = Fixture::doc({0});  // chat

  auto lam = [&](std::vector<double> v1, std::vector<double> v2) {
    EmbeddingTable t1 = table({{"cat", std::move(v1)}});
    EmbeddingTable t2 = table({{"chat", std::move(v2)}});
    return compute_lambda(pair, t1, t2, f.vocab_l1, f.vocab_l2);
  };

  CHECK(lam({2, 1}, {2, 1}) == Catch::Approx(1.0).margin(1e-12));
  CHECK(lam({1, 0}, {0, 1}) == 0.0);
  CHECK(lam({1, 0}, {1, 1}) == Catch::Approx(0.7071067811865475).margin(1e-15));
  CHECK(lam({1, 0}, {-1, 0.1}) == 0.0);  // negative cosine clamps to 0
}

TEST_CASE("lambda falls back to 0 when either side has no vector") {
  Fixture f;
  DocumentPair pair;
  pair.doc_l1 = Fixture::doc({0});
  pair.doc_l2 = Fixture::doc({0});
  EmbeddingTable t1 = table({{"cat", {1, 0}}});
  EmbeddingTable t2 = table({{"unrelated", {1, 0}}});
  CHECK(compute_lambda(pair, t1, t2, f.vocab_l1, f.vocab_l2) == 0.0);
}

TEST_CASE("lambda is symmetric and scale-invariant") {
  Fixture f;
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a{rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> b{rng.normal(), rng.normal(), rng.normal()};
    DocumentPair pair;
    pair.doc_l1 = Fixture::doc({0, 1});
    pair.doc_l2 = Fixture::doc({1, 0});
    EmbeddingTable t1 = table({{"cat", a}, {"dog", b}});
    EmbeddingTable t2 = table({{"chat", b}, {"chien", a}});
    const double fwd = compute_lambda(pair, t1, t2, f.vocab_l1, f.vocab_l2);
    // Swap the sides: same two document vectors, roles exchanged.
    DocumentPair swapped;
    swapped.doc_l1 = pair.doc_l2;
    swapped.doc_l2 = pair.doc_l1;
    EmbeddingTable s1 = table({{"cat", b}, {"dog", a}});
    EmbeddingTable s2 = table({{"chat", a}, {"chien", b}});
    const double rev = compute_lambda(swapped, s1, s2, f.vocab_l1, f.vocab_l2);
    CHECK(fwd >= 0.0);
    CHECK(fwd <= 1.0);
    CHECK(fwd == Catch::Approx(rev).margin(1e-12));

    auto scaled = [](const std::vector<double>& v) {
      std::vector<double> out = v;
      for (double& x : out) x *= 7.5;
      return out;
    };
    EmbeddingTable t1s = table({{"cat", scaled(a)}, {"dog", scaled(b)}});
    EmbeddingTable t2s = table({{"chat", scaled(b)}, {"chien", scaled(a)}});
    CHECK(compute_lambda(pair, t1s, t2s, f.vocab_l1, f.vocab_l2) ==
          Catch::Approx(fwd).margin(1e-12));
  }
}

TEST_CASE("compute_lambdas fills every pair and the table writer emits them") {
  Fixture f;
  Corpus c;
  c.vocab_l1 = f.vocab_l1;
  c.vocab_l2 = f.vocab_l2;
  DocumentPair p1;
  p1.pair_id = "p1";
  p1.doc_l1 = Fixture::doc({0});
  p1.doc_l2 = Fixture::doc({0});
  DocumentPair p2 = p1;
  p2.pair_id = "p2";
  p2.doc_l1 = Fixture::doc({1});
  c.pairs = {p1, p2};

  EmbeddingTable t1 = table({{"cat", {1, 0}}, {"dog", {0, 1}}});
  EmbeddingTable t2 = table({{"chat", {1, 0}}});
  compute_lambdas(c, t1, t2);
  REQUIRE(c.pairs[0].lambda.has_value());
  CHECK(*c.pairs[0].lambda == Catch::Approx(1.0).margin(1e-12));
  CHECK(*c.pairs[1].lambda == 0.0);  // dog vs chat: orthogonal

  auto d = scratch::dir("emb_table");
  write_lambda_tsv(c, (d / "lambdas.tsv").string());
  const std::string tsv = scratch::slurp(d / "lambdas.tsv");
  CHECK(tsv.find("pair_id\tlambda") == 0);
  CHECK(tsv.find("p1\t") != std::string::npos);
  CHECK(tsv.find("p2\t0") != std::string::npos);
}
