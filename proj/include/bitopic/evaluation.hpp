#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitopic/corpus.hpp"
#include "bitopic/matrix.hpp"
#include "bitopic/model.hpp"
#include "bitopic/model_io.hpp"
#include "bitopic/rng.hpp"
#include "bitopic/sampler.hpp"

namespace bitopic {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for fewer than 2 values
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  double sum = 0.0;
  for (double x : v) sum += x;
  r.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return r;
}

// ---- KL divergence and MRR ----

inline void check_simplex(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x > 0.0)) throw std::runtime_error(std::string(name) + ": entries must be strictly positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::runtime_error(std::string(name) + ": entries must sum to 1");
}

inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::runtime_error("kl_divergence: size mismatch");
  check_simplex(p, "kl_divergence p");
  check_simplex(q, "kl_divergence q");
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) kl += p[k] * std::log(p[k] / q[k]);
  return kl;
}

inline double mean_reciprocal_rank(const std::vector<int32_t>& ranks) {
  if (ranks.empty()) throw std::runtime_error("mean_reciprocal_rank: no ranks");
  double sum = 0.0;
  for (int32_t r : ranks) {
    if (r < 1) throw std::runtime_error("mean_reciprocal_rank: ranks are 1-based");
    sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(ranks.size());
}

// ---- nPMI topic coherence ----

struct CoherenceReport {
  std::vector<int32_t> cardinalities;
  Matrix<double> per_topic;  // topics x cardinalities, mean pairwise npmi
  MeanStd aggregate;         // over all topic x cardinality cells
};

namespace detail {

struct WindowCounts {
  int64_t windows = 0;
  std::unordered_map<int32_t, int64_t> marginal;
  std::map<std::pair<int32_t, int32_t>, int64_t> joint;  // key has first < second
};

// Counts, over all sliding windows, how many contain each tracked word and
// each tracked pair. A document shorter than the window is one whole-document
// window.
inline WindowCounts count_windows(const std::vector<std::vector<int32_t>>& docs,
                                  const std::vector<int32_t>& tracked, int32_t window) {
  WindowCounts wc;
  std::unordered_map<int32_t, int32_t> track_index;
  for (int32_t w : tracked) track_index.emplace(w, 0);

  std::vector<int32_t> present;
  for (const auto& doc : docs) {
    if (doc.empty()) continue;
    const int64_t n = static_cast<int64_t>(doc.size());
    const int64_t width = std::min<int64_t>(window, n);
    const int64_t positions = n - width + 1;
    for (int64_t start = 0; start < positions; ++start) {
      ++wc.windows;
      present.clear();
      for (int64_t t = start; t < start + width; ++t) {
        if (track_index.count(doc[static_cast<std::size_t>(t)])) present.push_back(doc[static_cast<std::size_t>(t)]);
      }
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      for (std::size_t a = 0; a < present.size(); ++a) {
        ++wc.marginal[present[a]];
        for (std::size_t b = a + 1; b < present.size(); ++b) {
          ++wc.joint[{present[a], present[b]}];
        }
      }
    }
  }
  return wc;
}

inline double npmi_pair(const WindowCounts& wc, int32_t a, int32_t b) {
  if (a == b) throw std::runtime_error("npmi: degenerate identical pair");
  if (a > b) std::swap(a, b);
  auto jt = wc.joint.find({a, b});
  const int64_t joint = jt == wc.joint.end() ? 0 : jt->second;
  if (joint == 0) return -1.0;  // analytic limit of the normalization
  auto ma = wc.marginal.find(a);
  auto mb = wc.marginal.find(b);
  const double t = static_cast<double>(wc.windows);
  const double pj = static_cast<double>(joint) / t;
  if (pj >= 1.0) return 1.0;  // both words in every window
  const double pa = static_cast<double>(ma->second) / t;
  const double pb = static_cast<double>(mb->second) / t;
  const double pmi = std::log(pj / (pa * pb));
  const double v = pmi / (-std::log(pj));
  return std::clamp(v, -1.0, 1.0);
}

}  // namespace detail

// topics: per topic the top-N word ids (N = max cardinality), in the same id
// space as the reference documents.
inline CoherenceReport npmi(const std::vector<std::vector<int32_t>>& topic_words,
                            const std::vector<std::vector<int32_t>>& reference_docs,
                            std::vector<int32_t> cardinalities = {5, 10, 15}, int32_t window = 10) {
  if (window < 2) throw std::runtime_error("npmi: window must be at least 2");
  if (reference_docs.empty()) throw std::runtime_error("npmi: empty reference corpus");
  if (cardinalities.empty()) throw std::runtime_error("npmi: no cardinalities");
  std::sort(cardinalities.begin(), cardinalities.end());
  const int32_t max_card = cardinalities.back();
  for (const auto& tw : topic_words) {
    if (static_cast<int32_t>(tw.size()) < max_card)
      throw std::runtime_error("npmi: topic word list shorter than the largest cardinality");
  }

  std::vector<int32_t> tracked;
  for (const auto& tw : topic_words)
    tracked.insert(tracked.end(), tw.begin(), tw.begin() + max_card);
  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());

  detail::WindowCounts wc = detail::count_windows(reference_docs, tracked, window);
  if (wc.windows == 0) throw std::runtime_error("npmi: reference corpus has no windows");

  CoherenceReport report;
  report.cardinalities = cardinalities;
  const int64_t topics = static_cast<int64_t>(topic_words.size());
  report.per_topic = Matrix<double>(topics, static_cast<int64_t>(cardinalities.size()), 0.0);
  std::vector<double> cells;
  for (int64_t k = 0; k < topics; ++k) {
    for (std::size_t ci = 0; ci < cardinalities.size(); ++ci) {
      const int32_t card = cardinalities[ci];
      double sum = 0.0;
      int64_t pairs = 0;
      for (int32_t a = 0; a < card; ++a) {
        for (int32_t b = a + 1; b < card; ++b) {
          sum += detail::npmi_pair(wc, topic_words[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)],
                                   topic_words[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]);
          ++pairs;
        }
      }
      const double mean = sum / static_cast<double>(pairs);
      report.per_topic[k][static_cast<int64_t>(ci)] = mean;
      cells.push_back(mean);
    }
  }
  report.aggregate = mean_std(cells);
  return report;
}

// Convenience: score a trained model's topics against one language's side of
// a reference corpus. Topic words are aligned to the reference vocabulary by
// token string; tokens missing there get fresh negative ids, which never
// co-occur and so score -1 against everything, the stated zero-count policy.
inline CoherenceReport npmi_for_model(const Matrix<double>& phi, const Vocabulary& model_vocab,
                                      const Corpus& reference, int lang,
                                      std::vector<int32_t> cardinalities = {5, 10, 15},
                                      int32_t window = 10) {
  const int32_t max_card = *std::max_element(cardinalities.begin(), cardinalities.end());
  const Vocabulary& ref_vocab = reference.vocab(lang);
  int32_t next_missing = -1;
  std::vector<std::vector<int32_t>> topic_words;
  for (int32_t k = 0; k < static_cast<int32_t>(phi.rows()); ++k) {
    std::vector<int32_t> aligned;
    for (int32_t w : top_topic_words(phi, k, max_card)) {
      const int32_t rid = ref_vocab.id_of(model_vocab.token(w));
      aligned.push_back(rid >= 0 ? rid : next_missing--);
    }
    topic_words.push_back(std::move(aligned));
  }
  std::vector<std::vector<int32_t>> docs;
  docs.reserve(reference.pairs.size());
  for (const auto& p : reference.pairs) docs.push_back(Corpus::doc(p, lang).words);
  return npmi(topic_words, docs, std::move(cardinalities), window);
}

// ---- held-out perplexity ----

struct PerplexityResult {
  double combined = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  int64_t tokens_l1 = 0;
  int64_t tokens_l2 = 0;
};

// exp of the negative mean log-likelihood, P(w) = sum_k theta_k phi_{k,w},
// theta per document from held-out inference, phi frozen from training.
inline PerplexityResult corpus_perplexity(const Matrix<double>& phi_l1, const Matrix<double>& phi_l2,
                                          const HeldoutTheta& theta, const Corpus& heldout) {
  const int32_t topics = static_cast<int32_t>(phi_l1.rows());
  PerplexityResult r;
  double ll[2] = {0.0, 0.0};
  int64_t n[2] = {0, 0};
  for (int64_t i = 0; i < heldout.pair_count(); ++i) {
    for (int lang = 0; lang < 2; ++lang) {
      const Document& d = Corpus::doc(heldout.pairs[static_cast<std::size_t>(i)], lang);
      if (d.word_count() == 0) continue;
      const double* th = theta.theta(lang)[i];
      const Matrix<double>& phi = lang == 0 ? phi_l1 : phi_l2;
      for (int32_t w : d.words) {
        double pw = 0.0;
        for (int32_t k = 0; k < topics; ++k) pw += th[k] * phi[k][w];
        ll[lang] += std::log(pw);
        ++n[lang];
      }
    }
  }
  r.tokens_l1 = n[0];
  r.tokens_l2 = n[1];
  if (n[0] + n[1] == 0) throw std::runtime_error("perplexity: no held-out tokens");
  r.l1 = n[0] ? std::exp(-ll[0] / static_cast<double>(n[0])) : 0.0;
  r.l2 = n[1] ? std::exp(-ll[1] / static_cast<double>(n[1])) : 0.0;
  r.combined = std::exp(-(ll[0] + ll[1]) / static_cast<double>(n[0] + n[1]));
  return r;
}

// Paired inference against the trained model, then scoring. The held-out
// corpus must be encoded in the model's vocabularies.
inline PerplexityResult heldout_perplexity(const ModelState& trained, const Corpus& heldout,
                                           uint64_t seed, int32_t infer_iters = 0, int threads = 1) {
  HeldoutTheta theta = infer_heldout(trained, heldout, InferMode::Paired, seed, infer_iters, threads);
  Matrix<double> phi_l1, phi_l2;
  fill_phi(trained.psi_l1, trained.rowsum_l1, trained.config.beta, phi_l1);
  fill_phi(trained.psi_l2, trained.rowsum_l2, trained.config.beta, phi_l2);
  return corpus_perplexity(phi_l1, phi_l2, theta, heldout);
}

// ---- 10-fold cross-validation ----

struct FoldResult {
  PerplexityResult perplexity;
  int64_t oov_l1 = 0;  // held-out tokens outside the fold's training vocabulary
  int64_t oov_l2 = 0;
  int64_t train_pairs = 0;
  int64_t heldout_pairs = 0;
};

struct PerplexityReport {
  std::vector<FoldResult> folds;
  MeanStd combined;
  MeanStd l1;
  MeanStd l2;
};

namespace detail {

constexpr uint64_t kSaltFoldShuffle = 0x666f6c6400000001ull;
constexpr uint64_t kSaltFoldTrain = 0x666f6c6400000002ull;
constexpr uint64_t kSaltCldd = 0x636c646400000001ull;

// Keeps the original partitions: each surviving word stays in its original
// sentence and segment, groups emptied by the remap disappear.
inline Document remap_document(const Document& d, const std::vector<int32_t>& old_to_new,
                               int64_t* dropped) {
  Document out;
  out.sentences.push_back(0);
  out.segments.push_back(0);
  std::size_t si = 1, gi = 1;
  for (int32_t pos = 0; pos < d.word_count(); ++pos) {
    const int32_t nw = old_to_new[static_cast<std::size_t>(d.words[static_cast<std::size_t>(pos)])];
    if (nw < 0) {
      if (dropped) ++*dropped;
    } else {
      out.words.push_back(nw);
    }
    if (pos + 1 == d.sentences[si]) {
      if (out.word_count() > out.sentences.back()) out.sentences.push_back(out.word_count());
      ++si;
    }
    if (pos + 1 == d.segments[gi]) {
      if (out.word_count() > out.segments.back()) out.segments.push_back(out.word_count());
      ++gi;
    }
  }
  return out;
}

// Vocabulary for one fold: original ids restricted to tokens reaching
// min_count inside the given training pairs, renumbered densely in original
// id order.
inline Vocabulary fold_vocabulary(const Corpus& c, const std::vector<int64_t>& train_pairs, int lang,
                                  std::vector<int32_t>& old_to_new) {
  const Vocabulary& full = c.vocab(lang);
  std::vector<int64_t> counts(static_cast<std::size_t>(full.size()), 0);
  for (int64_t i : train_pairs) {
    for (int32_t w : Corpus::doc(c.pairs[static_cast<std::size_t>(i)], lang).words)
      ++counts[static_cast<std::size_t>(w)];
  }
  Vocabulary vocab;
  vocab.language = full.language;
  old_to_new.assign(static_cast<std::size_t>(full.size()), -1);
  for (int32_t w = 0; w < full.size(); ++w) {
    if (counts[static_cast<std::size_t>(w)] >= c.min_count) {
      old_to_new[static_cast<std::size_t>(w)] = vocab.add(full.token(w), counts[static_cast<std::size_t>(w)]);
    }
  }
  return vocab;
}

inline Corpus remap_corpus(const Corpus& c, const std::vector<int64_t>& pair_idx,
                           const Vocabulary& vocab_l1, const Vocabulary& vocab_l2,
                           const std::vector<int32_t>& map_l1, const std::vector<int32_t>& map_l2,
                           int64_t* oov_l1, int64_t* oov_l2) {
  Corpus out;
  out.vocab_l1 = vocab_l1;
  out.vocab_l2 = vocab_l2;
  out.segmentation = c.segmentation;
  out.has_sentences = c.has_sentences;
  out.min_count = c.min_count;
  for (int64_t i : pair_idx) {
    const DocumentPair& p = c.pairs[static_cast<std::size_t>(i)];
    DocumentPair q;
    q.pair_id = p.pair_id;
    q.lambda = p.lambda;
    q.doc_l1 = remap_document(p.doc_l1, map_l1, oov_l1);
    q.doc_l2 = remap_document(p.doc_l2, map_l2, oov_l2);
    out.pairs.push_back(std::move(q));
  }
  return out;
}

}  // namespace detail

// Deterministic fold assignment: seeded shuffle of pair indices, dealt
// round-robin into `folds` disjoint sets.
inline std::vector<std::vector<int64_t>> fold_assignment(int64_t pairs, int folds, uint64_t seed) {
  if (folds < 2) throw std::runtime_error("cross-validation needs at least 2 folds");
  if (pairs < folds) throw std::runtime_error("fewer pairs than folds");
  std::vector<int32_t> order(static_cast<std::size_t>(pairs));
  for (int64_t i = 0; i < pairs; ++i) order[static_cast<std::size_t>(i)] = static_cast<int32_t>(i);
  Rng rng(stream_seed(seed, detail::kSaltFoldShuffle, 0));
  rng.shuffle(order);
  std::vector<std::vector<int64_t>> sets(static_cast<std::size_t>(folds));
  for (std::size_t r = 0; r < order.size(); ++r) {
    sets[r % static_cast<std::size_t>(folds)].push_back(order[r]);
  }
  for (auto& s : sets) std::sort(s.begin(), s.end());
  return sets;
}

// Trains one model per fold on the other folds' pairs (rebuilding the
// vocabulary from those pairs alone) and scores paired perplexity on the
// held-out fold. Held-out tokens missing from the fold vocabulary are
// excluded and counted as OOV.
inline PerplexityReport crossval_perplexity(const Corpus& c, ModelConfig config, int folds = 10,
                                            int threads = 1) {
  config.resolve_defaults();
  config.validate();
  auto heldout_sets = fold_assignment(c.pair_count(), folds, config.seed);
  PerplexityReport report;
  std::vector<double> combined, l1s, l2s;
  for (int f = 0; f < folds; ++f) {
    const std::vector<int64_t>& held = heldout_sets[static_cast<std::size_t>(f)];
    std::vector<int64_t> train_idx;
    train_idx.reserve(static_cast<std::size_t>(c.pair_count() - static_cast<int64_t>(held.size())));
    std::size_t hi = 0;
    for (int64_t i = 0; i < c.pair_count(); ++i) {
      if (hi < held.size() && held[hi] == i) {
        ++hi;
        continue;
      }
      train_idx.push_back(i);
    }

    std::vector<int32_t> map_l1, map_l2;
    Vocabulary fv1 = detail::fold_vocabulary(c, train_idx, 0, map_l1);
    Vocabulary fv2 = detail::fold_vocabulary(c, train_idx, 1, map_l2);

    FoldResult fr;
    fr.train_pairs = static_cast<int64_t>(train_idx.size());
    fr.heldout_pairs = static_cast<int64_t>(held.size());
    int64_t train_dropped1 = 0, train_dropped2 = 0;  // filtered by the fold rebuild, not OOV
    Corpus fold_train =
        detail::remap_corpus(c, train_idx, fv1, fv2, map_l1, map_l2, &train_dropped1, &train_dropped2);
    Corpus heldout = detail::remap_corpus(c, held, fv1, fv2, map_l1, map_l2, &fr.oov_l1, &fr.oov_l2);

    ModelConfig fold_config = config;
    fold_config.seed = stream_seed(config.seed, detail::kSaltFoldTrain, static_cast<uint64_t>(f));
    TrainResult tr = train(fold_train, fold_config);
    fr.perplexity = heldout_perplexity(tr.state, heldout, fold_config.seed, config.infer_iters, threads);
    combined.push_back(fr.perplexity.combined);
    l1s.push_back(fr.perplexity.l1);
    l2s.push_back(fr.perplexity.l2);
    report.folds.push_back(fr);
  }
  report.combined = mean_std(combined);
  report.l1 = mean_std(l1s);
  report.l2 = mean_std(l2s);
  return report;
}

// ---- CLDD retrieval ----

enum class KlDirection { QueryToCandidate, CandidateToQuery };

inline KlDirection kl_direction_from_string(const std::string& s) {
  if (s == "query-to-candidate") return KlDirection::QueryToCandidate;
  if (s == "candidate-to-query") return KlDirection::CandidateToQuery;
  throw std::runtime_error("unknown KL direction '" + s +
                           "' (expected query-to-candidate or candidate-to-query)");
}

struct RetrievalRepeat {
  double mrr_l1_to_l2 = 0.0;
  double mrr_l2_to_l1 = 0.0;
};

struct RetrievalReport {
  std::vector<RetrievalRepeat> repeats;
  MeanStd l1_to_l2;
  MeanStd l2_to_l1;
  int32_t queries = 0;
};

namespace detail {

// Rank of the true counterpart among the sampled candidates when sorted by
// ascending KL, ties broken by candidate index. Uses
// KL(p||q) = -H(p) - sum_k p_k log q_k with log-theta precomputed per side.
inline int32_t counterpart_rank(const Matrix<double>& theta_q, const Matrix<double>& log_theta_c,
                                const std::vector<int32_t>& sampled, int32_t query_pos,
                                KlDirection dir, const Matrix<double>& theta_c,
                                const Matrix<double>& log_theta_q) {
  const int32_t topics = static_cast<int32_t>(theta_q.cols());
  const int64_t qi = sampled[static_cast<std::size_t>(query_pos)];
  auto score = [&](int64_t cand) {
    double s = 0.0;
    if (dir == KlDirection::QueryToCandidate) {
      const double* p = theta_q[qi];
      const double* lq = log_theta_c[cand];
      for (int32_t k = 0; k < topics; ++k) s += p[k] * (std::log(p[k]) - lq[k]);
    } else {
      const double* p = theta_c[cand];
      const double* lq = log_theta_q[qi];
      for (int32_t k = 0; k < topics; ++k) s += p[k] * (std::log(p[k]) - lq[k]);
    }
    return s;
  };
  const double own = score(qi);
  int32_t rank = 1;
  for (int32_t pos = 0; pos < static_cast<int32_t>(sampled.size()); ++pos) {
    const int64_t cand = sampled[static_cast<std::size_t>(pos)];
    if (cand == qi) continue;
    const double s = score(cand);
    if (s < own || (s == own && cand < qi)) ++rank;
  }
  return rank;
}

inline Matrix<double> log_matrix(const Matrix<double>& m) {
  Matrix<double> out(m.rows(), m.cols(), 0.0);
  for (int64_t r = 0; r < m.rows(); ++r) {
    for (int64_t c = 0; c < m.cols(); ++c) out[r][c] = std::log(m[r][c]);
  }
  return out;
}

}  // namespace detail

// Retrieval over inferred per-document topic distributions. Each repeat
// samples `queries_per_repeat` pairs without replacement; each query document
// ranks the sampled counterpart-side documents by KL and is scored by the
// reciprocal rank of its true counterpart.
inline RetrievalReport cldd_from_theta(const Matrix<double>& theta_l1, const Matrix<double>& theta_l2,
                                       int32_t queries_per_repeat, int32_t repeats, uint64_t seed,
                                       KlDirection dir = KlDirection::QueryToCandidate) {
  if (theta_l1.rows() != theta_l2.rows()) throw std::runtime_error("cldd: side size mismatch");
  const int64_t pairs = theta_l1.rows();
  if (queries_per_repeat < 1) throw std::runtime_error("cldd: queries_per_repeat must be positive");
  if (queries_per_repeat > pairs)
    throw std::runtime_error("cldd: more queries per repeat than held-out pairs");
  if (repeats < 1) throw std::runtime_error("cldd: repeats must be positive");

  const Matrix<double> log_l1 = detail::log_matrix(theta_l1);
  const Matrix<double> log_l2 = detail::log_matrix(theta_l2);

  RetrievalReport report;
  report.queries = queries_per_repeat;
  std::vector<double> fwd, rev;
  for (int32_t r = 0; r < repeats; ++r) {
    Rng rng(stream_seed(seed, detail::kSaltCldd, static_cast<uint64_t>(r)));
    std::vector<int32_t> sampled =
        rng.sample_without_replacement(static_cast<int32_t>(pairs), queries_per_repeat);
    std::sort(sampled.begin(), sampled.end());
    std::vector<int32_t> ranks_fwd, ranks_rev;
    for (int32_t pos = 0; pos < queries_per_repeat; ++pos) {
      ranks_fwd.push_back(
          detail::counterpart_rank(theta_l1, log_l2, sampled, pos, dir, theta_l2, log_l1));
      ranks_rev.push_back(
          detail::counterpart_rank(theta_l2, log_l1, sampled, pos, dir, theta_l1, log_l2));
    }
    RetrievalRepeat rep;
    rep.mrr_l1_to_l2 = mean_reciprocal_rank(ranks_fwd);
    rep.mrr_l2_to_l1 = mean_reciprocal_rank(ranks_rev);
    fwd.push_back(rep.mrr_l1_to_l2);
    rev.push_back(rep.mrr_l2_to_l1);
    report.repeats.push_back(rep);
  }
  report.l1_to_l2 = mean_std(fwd);
  report.l2_to_l1 = mean_std(rev);
  return report;
}

// Full protocol: unpaired inference (pair links hidden) over the held-out
// corpus, then sampled retrieval repeats. The seed drives both the inference
// streams and the repeat sampling.
inline RetrievalReport cldd(const ModelState& trained, const Corpus& heldout, uint64_t seed,
                            int32_t queries_per_repeat = 500, int32_t repeats = 10,
                            KlDirection dir = KlDirection::QueryToCandidate, int32_t infer_iters = 0,
                            int threads = 1) {
  HeldoutTheta theta =
      infer_heldout(trained, heldout, InferMode::Unpaired, seed, infer_iters, threads);
  return cldd_from_theta(theta.theta_l1, theta.theta_l2, queries_per_repeat, repeats, seed, dir);
}

// ---- report writers ----

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8g", v);
  return buf;
}

}  // namespace detail

inline void write_coherence_tsv(const CoherenceReport& r, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "topic\tcardinality\tnpmi\n";
  for (int64_t k = 0; k < r.per_topic.rows(); ++k) {
    for (std::size_t ci = 0; ci < r.cardinalities.size(); ++ci) {
      os << k << '\t' << r.cardinalities[ci] << '\t'
         << detail::fmt_double(r.per_topic[k][static_cast<int64_t>(ci)]) << '\n';
    }
  }
}

inline std::string coherence_summary(const CoherenceReport& r) {
  std::ostringstream os;
  os << "npmi_mean\t" << detail::fmt_double(r.aggregate.mean) << '\n';
  os << "npmi_stddev\t" << detail::fmt_double(r.aggregate.stddev) << '\n';
  return os.str();
}

inline void write_perplexity_tsv(const PerplexityReport& r, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "fold\tperplexity\tperplexity_l1\tperplexity_l2\ttokens_l1\ttokens_l2\toov_l1\toov_l2\t"
        "train_pairs\theldout_pairs\n";
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    const FoldResult& fr = r.folds[f];
    os << f << '\t' << detail::fmt_double(fr.perplexity.combined) << '\t'
       << detail::fmt_double(fr.perplexity.l1) << '\t' << detail::fmt_double(fr.perplexity.l2)
       << '\t' << fr.perplexity.tokens_l1 << '\t' << fr.perplexity.tokens_l2 << '\t' << fr.oov_l1
       << '\t' << fr.oov_l2 << '\t' << fr.train_pairs << '\t' << fr.heldout_pairs << '\n';
  }
}

inline std::string perplexity_summary(const PerplexityReport& r) {
  std::ostringstream os;
  os << "perplexity_mean\t" << detail::fmt_double(r.combined.mean) << '\n';
  os << "perplexity_stddev\t" << detail::fmt_double(r.combined.stddev) << '\n';
  os << "perplexity_l1_mean\t" << detail::fmt_double(r.l1.mean) << '\n';
  os << "perplexity_l1_stddev\t" << detail::fmt_double(r.l1.stddev) << '\n';
  os << "perplexity_l2_mean\t" << detail::fmt_double(r.l2.mean) << '\n';
  os << "perplexity_l2_stddev\t" << detail::fmt_double(r.l2.stddev) << '\n';
  return os.str();
}

inline void write_retrieval_tsv(const RetrievalReport& r, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "repeat\tmrr_l1_to_l2\tmrr_l2_to_l1\n";
  for (std::size_t i = 0; i < r.repeats.size(); ++i) {
    os << i << '\t' << detail::fmt_double(r.repeats[i].mrr_l1_to_l2) << '\t'
       << detail::fmt_double(r.repeats[i].mrr_l2_to_l1) << '\n';
  }
}

inline std::string retrieval_summary(const RetrievalReport& r) {
  std::ostringstream os;
  os << "queries_per_repeat\t" << r.queries << '\n';
  os << "mrr_l1_to_l2_mean\t" << detail::fmt_double(r.l1_to_l2.mean) << '\n';
  os << "mrr_l1_to_l2_stddev\t" << detail::fmt_double(r.l1_to_l2.stddev) << '\n';
  os << "mrr_l2_to_l1_mean\t" << detail::fmt_double(r.l2_to_l1.mean) << '\n';
  os << "mrr_l2_to_l1_stddev\t" << detail::fmt_double(r.l2_to_l1.stddev) << '\n';
  return os.str();
}

}  // namespace bitopic
