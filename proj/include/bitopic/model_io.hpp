#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitopic/corpus_io.hpp"
#include "bitopic/model.hpp"
#include "bitopic/sampler.hpp"

namespace bitopic {

// A trained model artifact carries the collapsed state plus the vocabularies
// it was trained against, so later stages can encode new text and label
// topics without the original corpus.
struct ModelArtifact {
  ModelState state;
  Vocabulary vocab_l1;
  Vocabulary vocab_l2;
};

namespace detail {

inline void write_count_matrix(std::ostream& os, const Matrix<int32_t>& m) {
  for (int64_t r = 0; r < m.rows(); ++r) {
    const int32_t* row = m[r];
    for (int64_t c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << row[c];
    }
    os << '\n';
  }
}

inline Matrix<int32_t> read_count_matrix(std::istream& is, int64_t rows, int64_t cols) {
  Matrix<int32_t> m(rows, cols, 0);
  for (int64_t r = 0; r < rows; ++r) {
    int32_t* row = m[r];
    for (int64_t c = 0; c < cols; ++c) {
      if (!(is >> row[c])) throw std::runtime_error("model file: truncated count matrix");
    }
  }
  return m;
}

}  // namespace detail

// Versioned plain-text layout; doubles as hexfloats, so save/load/save is
// byte-identical.
inline void save_model(const ModelArtifact& m, std::ostream& os) {
  const ModelState& st = m.state;
  const ModelConfig& cfg = st.config;
  const int64_t pairs = uses_lambda(cfg.kind) ? st.omega_l1.rows() : st.omega.rows();
  os << "bitopic-model 1\n";
  os << "kind " << to_string(cfg.kind) << '\n';
  os << "topics " << cfg.topics << '\n';
  os << "alpha " << double_to_text(cfg.alpha) << '\n';
  os << "beta " << double_to_text(cfg.beta) << '\n';
  os << "train_iters " << cfg.train_iters << '\n';
  os << "infer_iters " << cfg.infer_iters << '\n';
  os << "seed " << cfg.seed << '\n';
  detail::write_vocab(os, m.vocab_l1);
  detail::write_vocab(os, m.vocab_l2);
  for (int lang = 0; lang < 2; ++lang) {
    const auto& psi = st.psi(lang);
    os << "psi " << (lang + 1) << ' ' << psi.rows() << ' ' << psi.cols() << '\n';
    detail::write_count_matrix(os, psi);
  }
  os << "pairs " << pairs << '\n';
  if (uses_lambda(cfg.kind)) {
    os << "omega split\n";
    detail::write_count_matrix(os, st.omega_l1);
    detail::write_count_matrix(os, st.omega_l2);
    os << "lambda\n";
    for (int64_t i = 0; i < pairs; ++i) os << double_to_text(st.lambdas[static_cast<std::size_t>(i)]) << '\n';
  } else {
    os << "omega joint\n";
    detail::write_count_matrix(os, st.omega);
  }
  for (int lang = 0; lang < 2; ++lang) {
    const auto& z = st.z(lang);
    os << "assignments " << (lang + 1) << '\n';
    for (const auto& zi : z) {
      os << zi.size();
      for (int32_t t : zi) os << ' ' << t;
      os << '\n';
    }
  }
  os << "rng " << st.rng.save_state() << '\n';
}

inline void save_model(const ModelArtifact& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_model(m, os);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline ModelArtifact load_model(std::istream& is) {
  std::string magic, version;
  if (!(is >> magic >> version) || magic != "bitopic-model" || version != "1")
    throw std::runtime_error("not a bitopic-model version 1 file");
  ModelArtifact m;
  ModelState& st = m.state;
  ModelConfig& cfg = st.config;
  std::string tag, kind, alpha, beta;
  if (!(is >> tag >> kind) || tag != "kind") throw std::runtime_error("model file: bad kind line");
  cfg.kind = model_kind_from_string(kind);
  if (!(is >> tag >> cfg.topics) || tag != "topics") throw std::runtime_error("model file: bad topics line");
  if (!(is >> tag >> alpha) || tag != "alpha") throw std::runtime_error("model file: bad alpha line");
  cfg.alpha = double_from_text(alpha);
  if (!(is >> tag >> beta) || tag != "beta") throw std::runtime_error("model file: bad beta line");
  cfg.beta = double_from_text(beta);
  if (!(is >> tag >> cfg.train_iters) || tag != "train_iters")
    throw std::runtime_error("model file: bad train_iters line");
  if (!(is >> tag >> cfg.infer_iters) || tag != "infer_iters")
    throw std::runtime_error("model file: bad infer_iters line");
  if (!(is >> tag >> cfg.seed) || tag != "seed") throw std::runtime_error("model file: bad seed line");
  cfg.validate();
  m.vocab_l1 = detail::read_vocab(is);
  m.vocab_l2 = detail::read_vocab(is);
  for (int lang = 0; lang < 2; ++lang) {
    int which = 0;
    int64_t rows = 0, cols = 0;
    if (!(is >> tag >> which >> rows >> cols) || tag != "psi" || which != lang + 1)
      throw std::runtime_error("model file: bad psi header");
    st.psi(lang) = detail::read_count_matrix(is, rows, cols);
  }
  if (st.psi_l1.cols() != m.vocab_l1.size() || st.psi_l2.cols() != m.vocab_l2.size())
    throw std::runtime_error("model file: psi width does not match vocabulary");
  int64_t pairs = 0;
  if (!(is >> tag >> pairs) || tag != "pairs") throw std::runtime_error("model file: bad pairs line");
  std::string layout;
  if (!(is >> tag >> layout) || tag != "omega") throw std::runtime_error("model file: bad omega header");
  if (layout == "split") {
    if (!uses_lambda(cfg.kind)) throw std::runtime_error("model file: split omega for a shared-theta kind");
    st.omega_l1 = detail::read_count_matrix(is, pairs, cfg.topics);
    st.omega_l2 = detail::read_count_matrix(is, pairs, cfg.topics);
    if (!(is >> tag) || tag != "lambda") throw std::runtime_error("model file: missing lambda block");
    st.lambdas.resize(static_cast<std::size_t>(pairs));
    for (int64_t i = 0; i < pairs; ++i) {
      std::string v;
      if (!(is >> v)) throw std::runtime_error("model file: truncated lambda block");
      st.lambdas[static_cast<std::size_t>(i)] = double_from_text(v);
    }
  } else if (layout == "joint") {
    if (uses_lambda(cfg.kind)) throw std::runtime_error("model file: joint omega for a lambda kind");
    st.omega = detail::read_count_matrix(is, pairs, cfg.topics);
  } else {
    throw std::runtime_error("model file: unknown omega layout '" + layout + "'");
  }
  // Row sums are derived, not stored.
  for (int lang = 0; lang < 2; ++lang) {
    const auto& psi = st.psi(lang);
    auto& rowsum = st.rowsum(lang);
    rowsum.assign(static_cast<std::size_t>(psi.rows()), 0);
    for (int64_t k = 0; k < psi.rows(); ++k) {
      for (int64_t w = 0; w < psi.cols(); ++w) rowsum[static_cast<std::size_t>(k)] += psi[k][w];
    }
  }
  for (int lang = 0; lang < 2; ++lang) {
    int which = 0;
    if (!(is >> tag >> which) || tag != "assignments" || which != lang + 1)
      throw std::runtime_error("model file: bad assignments header");
    auto& z = st.z(lang);
    z.resize(static_cast<std::size_t>(pairs));
    for (int64_t i = 0; i < pairs; ++i) {
      int64_t n = 0;
      if (!(is >> n) || n < 0) throw std::runtime_error("model file: bad assignment count");
      auto& zi = z[static_cast<std::size_t>(i)];
      zi.resize(static_cast<std::size_t>(n));
      for (int64_t j = 0; j < n; ++j) {
        if (!(is >> zi[static_cast<std::size_t>(j)]))
          throw std::runtime_error("model file: truncated assignments");
      }
    }
  }
  if (!(is >> tag) || tag != "rng") throw std::runtime_error("model file: missing rng state");
  std::string rng_state;
  std::getline(is, rng_state);
  st.rng.restore_state(rng_state);
  return m;
}

inline ModelArtifact load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file '" + path + "'");
  return load_model(is);
}

// Top words per topic by descending probability, ties by id.
inline std::vector<int32_t> top_topic_words(const Matrix<double>& phi, int32_t topic, int32_t n) {
  const int32_t vocab = static_cast<int32_t>(phi.cols());
  std::vector<int32_t> idx(static_cast<std::size_t>(vocab));
  for (int32_t w = 0; w < vocab; ++w) idx[static_cast<std::size_t>(w)] = w;
  const double* row = phi[topic];
  const int32_t keep = std::min(n, vocab);
  std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(), [&](int32_t a, int32_t b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(keep));
  return idx;
}

inline void write_topics_tsv(const TopicEstimates& est, const Vocabulary& vocab_l1,
                             const Vocabulary& vocab_l2, int32_t top_n, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "language\ttopic\trank\ttoken\tprobability\n";
  char buf[64];
  for (int lang = 0; lang < 2; ++lang) {
    const Matrix<double>& phi = est.phi(lang);
    const Vocabulary& vocab = lang == 0 ? vocab_l1 : vocab_l2;
    for (int32_t k = 0; k < static_cast<int32_t>(phi.rows()); ++k) {
      auto top = top_topic_words(phi, k, top_n);
      for (std::size_t r = 0; r < top.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "%.8g", phi[k][top[r]]);
        os << vocab.language << '\t' << k << '\t' << (r + 1) << '\t' << vocab.token(top[r]) << '\t'
           << buf << '\n';
      }
    }
  }
}

}  // namespace bitopic
