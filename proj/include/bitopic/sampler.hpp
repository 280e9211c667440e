#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bitopic/corpus.hpp"
#include "bitopic/matrix.hpp"
#include "bitopic/model.hpp"
#include "bitopic/rng.hpp"

namespace bitopic {

// ---- conditional-weight building blocks ----
//
// All weight functions assume "not counting the unit" semantics: the counts
// they read must already exclude the unit being resampled. The counterpart
// counter of the lambda prior is the exception; it belongs to the other
// language and is read at its current value.

inline void fill_shared_prior(const int32_t* omega_row, int32_t topics, double alpha, double* prior) {
  for (int32_t k = 0; k < topics; ++k) prior[k] = static_cast<double>(omega_row[k]) + alpha;
}

// (self + lambda*other) + alpha, in this operand order. At lambda=1 the inner
// sum of two integer-valued doubles is exact, so the result is bitwise equal
// to the shared prior over the joint counter; at lambda=0 it is bitwise equal
// to the shared prior over the own-language counter.
inline void fill_lambda_prior(const int32_t* self_row, const int32_t* other_row, int32_t topics,
                              double lambda, double alpha, double* prior) {
  for (int32_t k = 0; k < topics; ++k) {
    prior[k] = (static_cast<double>(self_row[k]) + lambda * static_cast<double>(other_row[k])) + alpha;
  }
}

// weight_k = (psi_{k,w}+beta)/(rowsum_k+V*beta) * prior_k
inline void word_topic_weights(const Matrix<int32_t>& psi, const std::vector<int64_t>& rowsum,
                               double beta, int32_t w, const double* prior, double* out) {
  const int32_t topics = static_cast<int32_t>(psi.rows());
  const double vbeta = beta * static_cast<double>(psi.cols());
  for (int32_t k = 0; k < topics; ++k) {
    out[k] = (static_cast<double>(psi[k][w]) + beta) /
             (static_cast<double>(rowsum[static_cast<std::size_t>(k)]) + vbeta) * prior[k];
  }
}

// log((c)(c+1)...(c+n-1)) for c > 0. Short runs sum logs directly; long runs
// go through lgamma, whose error is still far below the sampler's tolerances.
inline double rising_log(double c, int32_t n) {
  if (n < 32) {
    double s = 0.0;
    for (int32_t m = 0; m < n; ++m) s += std::log(c + static_cast<double>(m));
    return s;
  }
  return std::lgamma(c + static_cast<double>(n)) - std::lgamma(c);
}

struct SegScratch {
  std::vector<int32_t> sorted;
  std::vector<double> logw;
};

// Segment weight up to one positive scale factor shared by all topics:
//   log w_k = log prior_k
//           + sum over distinct words w of log rising(psi_{k,w}+beta, n_w)
//           - log rising(rowsum_k+V*beta, n)
// exponentiated after subtracting the per-unit maximum so long segments do
// not underflow. Only the normalized distribution is meaningful.
inline void segment_topic_weights(const Matrix<int32_t>& psi, const std::vector<int64_t>& rowsum,
                                  double beta, std::span<const int32_t> words, const double* prior,
                                  SegScratch& scratch, double* out) {
  const int32_t topics = static_cast<int32_t>(psi.rows());
  const double vbeta = beta * static_cast<double>(psi.cols());
  const int32_t n = static_cast<int32_t>(words.size());

  scratch.sorted.assign(words.begin(), words.end());
  std::sort(scratch.sorted.begin(), scratch.sorted.end());
  scratch.logw.resize(static_cast<std::size_t>(topics));

  for (int32_t k = 0; k < topics; ++k) {
    double lw = std::log(prior[k]);
    for (std::size_t a = 0; a < scratch.sorted.size();) {
      std::size_t b = a;
      while (b < scratch.sorted.size() && scratch.sorted[b] == scratch.sorted[a]) ++b;
      lw += rising_log(static_cast<double>(psi[k][scratch.sorted[a]]) + beta,
                       static_cast<int32_t>(b - a));
      a = b;
    }
    lw -= rising_log(static_cast<double>(rowsum[static_cast<std::size_t>(k)]) + vbeta, n);
    scratch.logw[static_cast<std::size_t>(k)] = lw;
  }

  double mx = scratch.logw[0];
  for (int32_t k = 1; k < topics; ++k) mx = std::max(mx, scratch.logw[static_cast<std::size_t>(k)]);
  for (int32_t k = 0; k < topics; ++k) out[k] = std::exp(scratch.logw[static_cast<std::size_t>(k)] - mx);
}

// Singleton segments take the word-level linear path so they reproduce the
// word-level weights bit for bit; longer segments go through log space.
inline void unit_topic_weights(const Matrix<int32_t>& psi, const std::vector<int64_t>& rowsum,
                               double beta, std::span<const int32_t> words, const double* prior,
                               SegScratch& scratch, double* out) {
  if (words.size() == 1) {
    word_topic_weights(psi, rowsum, beta, words[0], prior, out);
  } else {
    segment_topic_weights(psi, rowsum, beta, words, prior, scratch, out);
  }
}

// ---- state-level conditionals, one per model kind ----
//
// Indices: i is the pair, lang selects the language (0 or 1), j is the unit
// (word position for word-level kinds, segment index for segment-level ones).
// Precondition: the unit's current topic has been decremented from psi,
// rowsum and the own-side omega row.

inline void conditional_weights_bilda(const ModelState& st, const Corpus& c, int64_t i, int lang,
                                      int32_t j, std::vector<double>& out) {
  const int32_t topics = st.config.topics;
  out.resize(static_cast<std::size_t>(topics));
  std::vector<double> prior(static_cast<std::size_t>(topics));
  fill_shared_prior(st.omega[i], topics, st.config.alpha, prior.data());
  const Document& d = Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang);
  word_topic_weights(st.psi(lang), st.rowsum(lang), st.config.beta,
                     d.words[static_cast<std::size_t>(j)], prior.data(), out.data());
}

inline void conditional_weights_seg(const ModelState& st, const Corpus& c, int64_t i, int lang,
                                    int32_t j, std::vector<double>& out) {
  const int32_t topics = st.config.topics;
  out.resize(static_cast<std::size_t>(topics));
  std::vector<double> prior(static_cast<std::size_t>(topics));
  fill_shared_prior(st.omega[i], topics, st.config.alpha, prior.data());
  const Document& d = Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang);
  SegScratch scratch;
  unit_topic_weights(st.psi(lang), st.rowsum(lang), st.config.beta, d.segment(j), prior.data(),
                     scratch, out.data());
}

inline void conditional_weights_lambda_bilda(const ModelState& st, const Corpus& c, int64_t i,
                                             int lang, int32_t j, std::vector<double>& out) {
  const int32_t topics = st.config.topics;
  out.resize(static_cast<std::size_t>(topics));
  std::vector<double> prior(static_cast<std::size_t>(topics));
  fill_lambda_prior(st.omega_lang(lang)[i], st.omega_lang(1 - lang)[i], topics,
                    st.lambdas[static_cast<std::size_t>(i)], st.config.alpha, prior.data());
  const Document& d = Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang);
  word_topic_weights(st.psi(lang), st.rowsum(lang), st.config.beta,
                     d.words[static_cast<std::size_t>(j)], prior.data(), out.data());
}

inline void conditional_weights_lambda_seg(const ModelState& st, const Corpus& c, int64_t i,
                                           int lang, int32_t j, std::vector<double>& out) {
  const int32_t topics = st.config.topics;
  out.resize(static_cast<std::size_t>(topics));
  std::vector<double> prior(static_cast<std::size_t>(topics));
  fill_lambda_prior(st.omega_lang(lang)[i], st.omega_lang(1 - lang)[i], topics,
                    st.lambdas[static_cast<std::size_t>(i)], st.config.alpha, prior.data());
  const Document& d = Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang);
  SegScratch scratch;
  unit_topic_weights(st.psi(lang), st.rowsum(lang), st.config.beta, d.segment(j), prior.data(),
                     scratch, out.data());
}

// ---- sampling ----

namespace detail {

inline int32_t sample_weights(const double* w, int32_t topics, Rng& rng, int64_t pair, int lang,
                              int32_t unit) {
  double total = 0.0;
  for (int32_t k = 0; k < topics; ++k) total += w[k];
  if (!std::isfinite(total) || !(total > 0.0)) {
    std::ostringstream os;
    os << "non-finite or non-positive weight total at pair " << pair << " language " << (lang + 1)
       << " unit " << unit;
    throw std::runtime_error(os.str());
  }
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (int32_t k = 0; k < topics; ++k) {
    acc += w[k];
    if (u < acc) return k;
  }
  return topics - 1;
}

inline std::span<const int32_t> unit_span(const Document& d, bool seg, int32_t j) {
  if (seg) return d.segment(j);
  return {d.words.data() + j, d.words.data() + j + 1};
}

inline int32_t unit_count(const Document& d, bool seg) {
  return seg ? d.segment_count() : d.word_count();
}

}  // namespace detail

// Resolves the per-pair lambdas for a lambda model: an explicit vector wins,
// otherwise the corpus pairs must all carry one.
inline std::vector<double> resolve_lambdas(const Corpus& c, const ModelConfig& config,
                                           const std::vector<double>* lambdas) {
  if (!uses_lambda(config.kind)) {
    if (lambdas) throw std::runtime_error("lambdas supplied for a model without a lambda prior");
    return {};
  }
  std::vector<double> out;
  if (lambdas) {
    if (static_cast<int64_t>(lambdas->size()) != c.pair_count())
      throw std::runtime_error("lambda vector size does not match pair count");
    out = *lambdas;
  } else {
    out.reserve(c.pairs.size());
    for (const auto& p : c.pairs) {
      if (!p.lambda)
        throw std::runtime_error("model '" + std::string(to_string(config.kind)) +
                                 "' needs a lambda for every pair (pair '" + p.pair_id +
                                 "' has none)");
      out.push_back(*p.lambda);
    }
  }
  for (double l : out) {
    if (!(l >= 0.0) || !(l <= 1.0)) throw std::runtime_error("lambda outside [0,1]");
  }
  return out;
}

inline ModelState initialize(const Corpus& c, ModelConfig config,
                             const std::vector<double>* lambdas = nullptr) {
  config.resolve_defaults();
  config.validate();
  const bool seg = segment_level(config.kind);
  const bool lam = uses_lambda(config.kind);
  const int32_t topics = config.topics;
  const int64_t pairs = c.pair_count();

  ModelState st;
  st.config = config;
  st.lambdas = resolve_lambdas(c, config, lambdas);
  st.psi_l1 = Matrix<int32_t>(topics, c.vocab_l1.size(), 0);
  st.psi_l2 = Matrix<int32_t>(topics, c.vocab_l2.size(), 0);
  st.rowsum_l1.assign(static_cast<std::size_t>(topics), 0);
  st.rowsum_l2.assign(static_cast<std::size_t>(topics), 0);
  if (lam) {
    st.omega_l1 = Matrix<int32_t>(pairs, topics, 0);
    st.omega_l2 = Matrix<int32_t>(pairs, topics, 0);
  } else {
    st.omega = Matrix<int32_t>(pairs, topics, 0);
  }
  st.z_l1.resize(static_cast<std::size_t>(pairs));
  st.z_l2.resize(static_cast<std::size_t>(pairs));
  st.rng = Rng(config.seed);

  for (int64_t i = 0; i < pairs; ++i) {
    for (int lang = 0; lang < 2; ++lang) {
      const Document& d = Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang);
      const int32_t units = detail::unit_count(d, seg);
      auto& z = st.z(lang)[static_cast<std::size_t>(i)];
      z.resize(static_cast<std::size_t>(units));
      auto& psi = st.psi(lang);
      auto& rowsum = st.rowsum(lang);
      int32_t* om = lam ? st.omega_lang(lang)[i] : st.omega[i];
      for (int32_t j = 0; j < units; ++j) {
        const int32_t k = static_cast<int32_t>(st.rng.uniform_int(static_cast<uint64_t>(topics)));
        z[static_cast<std::size_t>(j)] = k;
        auto span = detail::unit_span(d, seg, j);
        for (int32_t w : span) {
          ++psi[k][w];
          ++rowsum[static_cast<std::size_t>(k)];
        }
        om[k] += static_cast<int32_t>(span.size());
      }
    }
  }
  return st;
}

inline void gibbs_sweep(ModelState& st, const Corpus& c) {
  const ModelConfig& cfg = st.config;
  const bool seg = segment_level(cfg.kind);
  const bool lam = uses_lambda(cfg.kind);
  const int32_t topics = cfg.topics;
  std::vector<double> prior(static_cast<std::size_t>(topics));
  std::vector<double> weights(static_cast<std::size_t>(topics));
  SegScratch scratch;

  for (int64_t i = 0; i < c.pair_count(); ++i) {
    for (int lang = 0; lang < 2; ++lang) {
      const Document& d = Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang);
      auto& z = st.z(lang)[static_cast<std::size_t>(i)];
      auto& psi = st.psi(lang);
      auto& rowsum = st.rowsum(lang);
      int32_t* om_self = lam ? st.omega_lang(lang)[i] : st.omega[i];
      const int32_t* om_other = lam ? st.omega_lang(1 - lang)[i] : nullptr;
      const double lambda = lam ? st.lambdas[static_cast<std::size_t>(i)] : 0.0;
      const int32_t units = detail::unit_count(d, seg);

      for (int32_t j = 0; j < units; ++j) {
        auto span = detail::unit_span(d, seg, j);
        const int32_t old = z[static_cast<std::size_t>(j)];
        for (int32_t w : span) {
          --psi[old][w];
          --rowsum[static_cast<std::size_t>(old)];
        }
        om_self[old] -= static_cast<int32_t>(span.size());

        if (lam) {
          fill_lambda_prior(om_self, om_other, topics, lambda, cfg.alpha, prior.data());
        } else {
          fill_shared_prior(om_self, topics, cfg.alpha, prior.data());
        }
        unit_topic_weights(psi, rowsum, cfg.beta, span, prior.data(), scratch, weights.data());

        const int32_t next = detail::sample_weights(weights.data(), topics, st.rng, i, lang, j);
        z[static_cast<std::size_t>(j)] = next;
        for (int32_t w : span) {
          ++psi[next][w];
          ++rowsum[static_cast<std::size_t>(next)];
        }
        om_self[next] += static_cast<int32_t>(span.size());
      }
    }
  }
}

// ---- point estimates ----

inline void fill_phi(const Matrix<int32_t>& psi, const std::vector<int64_t>& rowsum, double beta,
                     Matrix<double>& phi) {
  const int32_t topics = static_cast<int32_t>(psi.rows());
  const int32_t vocab = static_cast<int32_t>(psi.cols());
  const double vbeta = beta * static_cast<double>(vocab);
  phi = Matrix<double>(topics, vocab, 0.0);
  for (int32_t k = 0; k < topics; ++k) {
    const double denom = static_cast<double>(rowsum[static_cast<std::size_t>(k)]) + vbeta;
    for (int32_t w = 0; w < vocab; ++w) {
      phi[k][w] = (static_cast<double>(psi[k][w]) + beta) / denom;
    }
  }
}

inline void shared_theta_row(const int32_t* omega_row, int32_t topics, double alpha, double* out) {
  int64_t n = 0;
  for (int32_t k = 0; k < topics; ++k) n += omega_row[k];
  const double denom = static_cast<double>(n) + static_cast<double>(topics) * alpha;
  for (int32_t k = 0; k < topics; ++k) out[k] = (static_cast<double>(omega_row[k]) + alpha) / denom;
}

inline void lambda_theta_row(const int32_t* self_row, const int32_t* other_row, int32_t topics,
                             double lambda, double alpha, double* out) {
  int64_t n_self = 0, n_other = 0;
  for (int32_t k = 0; k < topics; ++k) {
    n_self += self_row[k];
    n_other += other_row[k];
  }
  const double denom = (static_cast<double>(n_self) + lambda * static_cast<double>(n_other)) +
                       static_cast<double>(topics) * alpha;
  for (int32_t k = 0; k < topics; ++k) {
    out[k] = ((static_cast<double>(self_row[k]) + lambda * static_cast<double>(other_row[k])) + alpha) /
             denom;
  }
}

inline TopicEstimates estimate(const ModelState& st) {
  const int32_t topics = st.config.topics;
  TopicEstimates est;
  est.shared_theta = !uses_lambda(st.config.kind);
  fill_phi(st.psi_l1, st.rowsum_l1, st.config.beta, est.phi_l1);
  fill_phi(st.psi_l2, st.rowsum_l2, st.config.beta, est.phi_l2);
  const int64_t pairs = est.shared_theta ? st.omega.rows() : st.omega_l1.rows();
  est.theta_l1 = Matrix<double>(pairs, topics, 0.0);
  est.theta_l2 = Matrix<double>(pairs, topics, 0.0);
  for (int64_t i = 0; i < pairs; ++i) {
    if (est.shared_theta) {
      shared_theta_row(st.omega[i], topics, st.config.alpha, est.theta_l1[i]);
      for (int32_t k = 0; k < topics; ++k) est.theta_l2[i][k] = est.theta_l1[i][k];
    } else {
      const double lambda = st.lambdas[static_cast<std::size_t>(i)];
      lambda_theta_row(st.omega_l1[i], st.omega_l2[i], topics, lambda, st.config.alpha,
                       est.theta_l1[i]);
      lambda_theta_row(st.omega_l2[i], st.omega_l1[i], topics, lambda, st.config.alpha,
                       est.theta_l2[i]);
    }
  }
  return est;
}

struct TrainResult {
  ModelState state;
  TopicEstimates estimates;
};

inline TrainResult train(const Corpus& c, ModelConfig config,
                         const std::vector<double>* lambdas = nullptr) {
  TrainResult r;
  r.state = initialize(c, config, lambdas);
  for (int32_t it = 0; it < r.state.config.train_iters; ++it) gibbs_sweep(r.state, c);
  r.estimates = estimate(r.state);
  return r;
}

// ---- held-out inference with frozen topic-word counts ----

enum class InferMode { Paired, Unpaired };

struct HeldoutTheta {
  Matrix<double> theta_l1;  // one row per held-out pair
  Matrix<double> theta_l2;
  std::vector<uint8_t> empty_l1;  // document had no in-vocabulary words; theta row is uniform
  std::vector<uint8_t> empty_l2;

  const Matrix<double>& theta(int lang) const { return lang == 0 ? theta_l1 : theta_l2; }
  const std::vector<uint8_t>& empty(int lang) const { return lang == 0 ? empty_l1 : empty_l2; }
};

namespace detail {

constexpr uint64_t kSaltPaired = 0x7061697200000001ull;
constexpr uint64_t kSaltUnpaired[2] = {0x756e706100000001ull, 0x756e706100000002ull};

template <class F>
inline void parallel_for(int64_t n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  const int workers = static_cast<int>(std::min<int64_t>(threads, n));
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      try {
        for (int64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// One Gibbs pass over one document's units against frozen psi counts: only
// the local omega row and assignments move.
inline void infer_doc_pass(const Document& d, bool seg, const Matrix<int32_t>& psi,
                           const std::vector<int64_t>& rowsum, const ModelConfig& cfg,
                           std::vector<int32_t>& z, int32_t* om_self, const int32_t* om_other,
                           double lambda, Rng& rng, std::vector<double>& prior,
                           std::vector<double>& weights, SegScratch& scratch, int64_t pair_index,
                           int lang) {
  const int32_t topics = cfg.topics;
  const int32_t units = unit_count(d, seg);
  for (int32_t j = 0; j < units; ++j) {
    auto span = unit_span(d, seg, j);
    const int32_t old = z[static_cast<std::size_t>(j)];
    om_self[old] -= static_cast<int32_t>(span.size());
    if (om_other) {
      fill_lambda_prior(om_self, om_other, topics, lambda, cfg.alpha, prior.data());
    } else {
      fill_shared_prior(om_self, topics, cfg.alpha, prior.data());
    }
    unit_topic_weights(psi, rowsum, cfg.beta, span, prior.data(), scratch, weights.data());
    const int32_t next = sample_weights(weights.data(), topics, rng, pair_index, lang, j);
    z[static_cast<std::size_t>(j)] = next;
    om_self[next] += static_cast<int32_t>(span.size());
  }
}

inline void init_doc_units(const Document& d, bool seg, int32_t topics, std::vector<int32_t>& z,
                           int32_t* om, Rng& rng) {
  const int32_t units = unit_count(d, seg);
  z.resize(static_cast<std::size_t>(units));
  for (int32_t j = 0; j < units; ++j) {
    const int32_t k = static_cast<int32_t>(rng.uniform_int(static_cast<uint64_t>(topics)));
    z[static_cast<std::size_t>(j)] = k;
    om[k] += static_cast<int32_t>(unit_span(d, seg, j).size());
  }
}

}  // namespace detail

// Infers document-topic distributions for held-out pairs against a trained
// model. psi stays frozen; every pair (paired mode) or document (unpaired
// mode) runs on its own stream derived from the given seed, so results are
// independent of thread count and, in unpaired mode, of the other language's
// inputs entirely.
//
// Paired mode keeps the model's own theta structure: a joint counter for the
// shared kinds, lambda-bound per-language counters for the lambda kinds
// (lambda read from the held-out pair, 0 when absent). Unpaired mode treats
// every document as an isolated monolingual document under any kind.
inline HeldoutTheta infer_heldout(const ModelState& trained, const Corpus& heldout, InferMode mode,
                                  uint64_t seed, int32_t infer_iters = 0, int threads = 1) {
  const ModelConfig& cfg = trained.config;
  const int32_t topics = cfg.topics;
  const bool seg = segment_level(cfg.kind);
  const bool lam = uses_lambda(cfg.kind);
  const int32_t iters = infer_iters > 0 ? infer_iters : cfg.infer_iters;
  if (trained.psi_l1.cols() != heldout.vocab_l1.size() ||
      trained.psi_l2.cols() != heldout.vocab_l2.size())
    throw std::runtime_error("held-out corpus vocabulary does not match the trained model");

  const int64_t pairs = heldout.pair_count();
  HeldoutTheta out;
  out.theta_l1 = Matrix<double>(pairs, topics, 1.0 / static_cast<double>(topics));
  out.theta_l2 = Matrix<double>(pairs, topics, 1.0 / static_cast<double>(topics));
  out.empty_l1.assign(static_cast<std::size_t>(pairs), 0);
  out.empty_l2.assign(static_cast<std::size_t>(pairs), 0);

  if (mode == InferMode::Paired) {
    detail::parallel_for(pairs, threads, [&](int64_t i) {
      const DocumentPair& p = heldout.pairs[static_cast<std::size_t>(i)];
      const double lambda = lam ? p.lambda.value_or(0.0) : 0.0;
      Rng rng(stream_seed(seed, detail::kSaltPaired, static_cast<uint64_t>(i)));
      std::vector<int32_t> om_joint(lam ? 0 : static_cast<std::size_t>(topics), 0);
      std::vector<int32_t> om_l1(lam ? static_cast<std::size_t>(topics) : 0, 0);
      std::vector<int32_t> om_l2(lam ? static_cast<std::size_t>(topics) : 0, 0);
      std::vector<std::vector<int32_t>> z(2);
      for (int lang = 0; lang < 2; ++lang) {
        int32_t* om = lam ? (lang == 0 ? om_l1.data() : om_l2.data()) : om_joint.data();
        detail::init_doc_units(Corpus::doc(p, lang), seg, topics, z[static_cast<std::size_t>(lang)],
                               om, rng);
      }
      std::vector<double> prior(static_cast<std::size_t>(topics));
      std::vector<double> weights(static_cast<std::size_t>(topics));
      SegScratch scratch;
      for (int32_t it = 0; it < iters; ++it) {
        for (int lang = 0; lang < 2; ++lang) {
          int32_t* om_self = lam ? (lang == 0 ? om_l1.data() : om_l2.data()) : om_joint.data();
          const int32_t* om_other = lam ? (lang == 0 ? om_l2.data() : om_l1.data()) : nullptr;
          detail::infer_doc_pass(Corpus::doc(p, lang), seg, trained.psi(lang), trained.rowsum(lang),
                                 cfg, z[static_cast<std::size_t>(lang)], om_self, om_other, lambda,
                                 rng, prior, weights, scratch, i, lang);
        }
      }
      for (int lang = 0; lang < 2; ++lang) {
        double* row = lang == 0 ? out.theta_l1[i] : out.theta_l2[i];
        if (Corpus::doc(p, lang).word_count() == 0) {
          (lang == 0 ? out.empty_l1 : out.empty_l2)[static_cast<std::size_t>(i)] = 1;
          continue;  // row stays uniform
        }
        if (lam) {
          const int32_t* self = lang == 0 ? om_l1.data() : om_l2.data();
          const int32_t* other = lang == 0 ? om_l2.data() : om_l1.data();
          lambda_theta_row(self, other, topics, lambda, cfg.alpha, row);
        } else {
          shared_theta_row(om_joint.data(), topics, cfg.alpha, row);
        }
      }
    });
    return out;
  }

  // Unpaired: each (language, document) cell runs in isolation on its own
  // stream with its own counter and no binding term.
  for (int lang = 0; lang < 2; ++lang) {
    detail::parallel_for(pairs, threads, [&, lang](int64_t i) {
      const Document& d = Corpus::doc(heldout.pairs[static_cast<std::size_t>(i)], lang);
      double* row = lang == 0 ? out.theta_l1[i] : out.theta_l2[i];
      if (d.word_count() == 0) {
        (lang == 0 ? out.empty_l1 : out.empty_l2)[static_cast<std::size_t>(i)] = 1;
        return;
      }
      Rng rng(stream_seed(seed, detail::kSaltUnpaired[lang], static_cast<uint64_t>(i)));
      std::vector<int32_t> om(static_cast<std::size_t>(topics), 0);
      std::vector<int32_t> z;
      detail::init_doc_units(d, seg, topics, z, om.data(), rng);
      std::vector<double> prior(static_cast<std::size_t>(topics));
      std::vector<double> weights(static_cast<std::size_t>(topics));
      SegScratch scratch;
      for (int32_t it = 0; it < iters; ++it) {
        detail::infer_doc_pass(d, seg, trained.psi(lang), trained.rowsum(lang), cfg, z, om.data(),
                               nullptr, 0.0, rng, prior, weights, scratch, i, lang);
      }
      shared_theta_row(om.data(), topics, cfg.alpha, row);
    });
  }
  return out;
}

}  // namespace bitopic
