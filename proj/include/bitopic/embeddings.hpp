#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bitopic/corpus.hpp"
#include "bitopic/vocabulary.hpp"

namespace bitopic {

struct EmbeddingTable {
  std::string language;
  int32_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& token) const {
    auto it = vectors.find(token);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

// Text interchange format: header "<count> <dim>", then one word per line
// followed by dim reals. Duplicate words keep the first occurrence.
inline EmbeddingTable load_embedding_file(const std::string& path, int64_t* duplicates = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file '" + path + "'");
  EmbeddingTable table;
  int64_t count = 0;
  if (!(in >> count >> table.dim)) throw std::runtime_error(path + ": bad embedding header");
  if (table.dim <= 0) throw std::runtime_error(path + ": dimension must be positive");
  int64_t dups = 0;
  for (int64_t i = 0; i < count; ++i) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error(path + ": truncated embedding file");
    std::vector<double> vec(static_cast<std::size_t>(table.dim));
    for (double& x : vec) {
      if (!(in >> x)) throw std::runtime_error(path + ": row for '" + token + "' has too few values");
    }
    if (!table.vectors.emplace(std::move(token), std::move(vec)).second) ++dups;
  }
  if (table.vectors.empty()) throw std::runtime_error(path + ": no vectors loaded");
  if (duplicates) *duplicates = dups;
  return table;
}

inline std::pair<EmbeddingTable, EmbeddingTable> load_embeddings(const std::string& path_l1,
                                                                 const std::string& path_l2,
                                                                 int64_t* duplicates = nullptr) {
  int64_t d1 = 0, d2 = 0;
  EmbeddingTable t1 = load_embedding_file(path_l1, &d1);
  EmbeddingTable t2 = load_embedding_file(path_l2, &d2);
  if (t1.dim != t2.dim) {
    std::ostringstream os;
    os << "embedding dimension mismatch: " << path_l1 << " has " << t1.dim << ", " << path_l2
       << " has " << t2.dim;
    throw std::runtime_error(os.str());
  }
  if (duplicates) *duplicates = d1 + d2;
  return {std::move(t1), std::move(t2)};
}

// Occurrence-weighted mean of the embeddings of the document's words; a word
// appearing twice contributes twice. Absent when no word has an embedding.
inline std::optional<std::vector<double>> doc_vector(const Document& doc, const EmbeddingTable& table,
                                                     const Vocabulary& vocab) {
  std::vector<double> sum(static_cast<std::size_t>(table.dim), 0.0);
  int64_t n = 0;
  for (int32_t w : doc.words) {
    const std::vector<double>* vec = table.find(vocab.token(w));
    if (!vec) continue;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += (*vec)[d];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(n);
  return sum;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Binding strength: cosine of the two document vectors, clamped into [0,1].
// The clamp keeps the document prior parameters positive; absent vectors fall
// back to 0 (the pair's sides mix independently).
inline double compute_lambda(const DocumentPair& pair, const EmbeddingTable& table_l1,
                             const EmbeddingTable& table_l2, const Vocabulary& vocab_l1,
                             const Vocabulary& vocab_l2) {
  auto v1 = doc_vector(pair.doc_l1, table_l1, vocab_l1);
  auto v2 = doc_vector(pair.doc_l2, table_l2, vocab_l2);
  if (!v1 || !v2) return 0.0;
  double cos = cosine(*v1, *v2);
  if (cos < 0.0) return 0.0;
  if (cos > 1.0) return 1.0;
  return cos;
}

// Fills pair.lambda for every pair in place.
inline void compute_lambdas(Corpus& c, const EmbeddingTable& table_l1, const EmbeddingTable& table_l2) {
  for (auto& p : c.pairs) {
    p.lambda = compute_lambda(p, table_l1, table_l2, c.vocab_l1, c.vocab_l2);
  }
}

inline void write_lambda_tsv(const Corpus& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "pair_id\tlambda\n";
  char buf[64];
  for (const auto& p : c.pairs) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.lambda.value_or(0.0));
    os << p.pair_id << '\t' << buf << '\n';
  }
}

}  // namespace bitopic
