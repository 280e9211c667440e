// Command-line pipeline: preprocess a paired corpus, train one of the four
// models, and run the three evaluations. Stages exchange file artifacts so a
// preprocessed corpus can feed many training and evaluation runs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitopic/bitopic.hpp"

namespace fs = std::filesystem;
using namespace bitopic;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  os << content;
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

fs::path prepare_outdir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

// Every run leaves its resolved flag values next to its outputs; rerunning
// the subcommand with --config on that file reproduces the run.
void write_run_config(CLI::App* sub, const fs::path& outdir) {
  write_text(outdir / "run_config.cfg",
             "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false));
}

struct PreprocessArgs {
  std::string input;
  std::string output;
  std::string mode = "word";
  int32_t top_bigrams = 1000;
  std::string stopwords_l1;
  std::string stopwords_l2;
  int32_t min_count = 4;
  std::string lang_l1 = "l1";
  std::string lang_l2 = "l2";
};

void run_preprocess(const PreprocessArgs& a, CLI::App* sub) {
  fs::path out = prepare_outdir(a.output);
  PreprocessConfig pc;
  pc.stopwords_l1 = a.stopwords_l1;
  pc.stopwords_l2 = a.stopwords_l2;
  pc.min_count = a.min_count;
  pc.language_l1 = a.lang_l1;
  pc.language_l2 = a.lang_l2;
  LoadReport report;
  Corpus c = load_pairs(a.input, pc, &report);
  const SegmentationMode mode = segmentation_mode_from_string(a.mode);
  if (mode == SegmentationMode::Bigram) {
    BigramLists lists = segment_bigrams(c, a.top_bigrams);
    write_bigrams_tsv(lists.l1, c.vocab_l1, (out / "bigrams_l1.tsv").string());
    write_bigrams_tsv(lists.l2, c.vocab_l2, (out / "bigrams_l2.tsv").string());
  } else {
    apply_segmentation(c, mode);
  }
  save_corpus(c, (out / "corpus.btc").string());
  write_vocab_tsv(c.vocab_l1, (out / "vocab_l1.tsv").string());
  write_vocab_tsv(c.vocab_l2, (out / "vocab_l2.tsv").string());
  write_text(out / "load_report.txt", report.summary() + "\n");
  std::cerr << report.summary() << '\n';
  write_run_config(sub, out);
}

struct SplitArgs {
  std::string corpus;
  std::string output;
  int64_t heldout = 0;
  uint64_t seed = 0;
};

void run_split(const SplitArgs& a, CLI::App* sub) {
  fs::path out = prepare_outdir(a.output);
  Corpus c = load_corpus(a.corpus);
  if (a.heldout < 1 || a.heldout >= c.pair_count())
    throw std::runtime_error("--heldout must be between 1 and pair count - 1");
  Rng rng(a.seed);
  std::vector<int32_t> held =
      rng.sample_without_replacement(static_cast<int32_t>(c.pair_count()), static_cast<int32_t>(a.heldout));
  std::sort(held.begin(), held.end());
  Corpus train_c, held_c;
  for (Corpus* part : {&train_c, &held_c}) {
    part->vocab_l1 = c.vocab_l1;
    part->vocab_l2 = c.vocab_l2;
    part->segmentation = c.segmentation;
    part->has_sentences = c.has_sentences;
    part->min_count = c.min_count;
  }
  std::size_t hi = 0;
  for (int64_t i = 0; i < c.pair_count(); ++i) {
    if (hi < held.size() && held[hi] == i) {
      held_c.pairs.push_back(c.pairs[static_cast<std::size_t>(i)]);
      ++hi;
    } else {
      train_c.pairs.push_back(c.pairs[static_cast<std::size_t>(i)]);
    }
  }
  save_corpus(train_c, (out / "corpus_train.btc").string());
  save_corpus(held_c, (out / "corpus_heldout.btc").string());
  write_run_config(sub, out);
}

struct TrainArgs {
  std::string corpus;
  std::string model = "bilda";
  std::string segments;  // empty: keep the corpus artifact's segmentation
  int32_t topics = 0;
  double alpha = 0.0;  // 0 resolves to 1/topics
  double beta = 0.01;
  int32_t iters = 200;
  int32_t infer_iters = 100;
  uint64_t seed = 0;
  std::string embeddings_l1;
  std::string embeddings_l2;
  int32_t top_words = 15;
  int32_t top_bigrams = 1000;
  std::string output;
};

ModelConfig config_from_train_args(const TrainArgs& a) {
  ModelConfig cfg;
  cfg.kind = model_kind_from_string(a.model);
  cfg.topics = a.topics;
  cfg.alpha = a.alpha;
  cfg.beta = a.beta;
  cfg.train_iters = a.iters;
  cfg.infer_iters = a.infer_iters;
  cfg.seed = a.seed;
  return cfg;
}

// Lambda models need per-pair binding strengths from embeddings; the others
// must not silently accept embedding flags.
void attach_lambdas(Corpus& c, ModelKind kind, const std::string& emb_l1, const std::string& emb_l2) {
  if (!uses_lambda(kind)) return;
  if (emb_l1.empty() || emb_l2.empty())
    throw std::runtime_error("model '" + std::string(to_string(kind)) +
                             "' needs --embeddings-l1 and --embeddings-l2");
  auto [t1, t2] = load_embeddings(emb_l1, emb_l2);
  compute_lambdas(c, t1, t2);
}

void run_train(const TrainArgs& a, CLI::App* sub) {
  fs::path out = prepare_outdir(a.output);
  Corpus c = load_corpus(a.corpus);
  if (!a.segments.empty())
    apply_segmentation(c, segmentation_mode_from_string(a.segments), a.top_bigrams);
  ModelConfig cfg = config_from_train_args(a);
  attach_lambdas(c, cfg.kind, a.embeddings_l1, a.embeddings_l2);
  TrainResult tr = train(c, cfg);
  ModelArtifact art;
  art.state = std::move(tr.state);
  art.vocab_l1 = c.vocab_l1;
  art.vocab_l2 = c.vocab_l2;
  save_model(art, (out / "model.btm").string());
  write_topics_tsv(tr.estimates, c.vocab_l1, c.vocab_l2, a.top_words, (out / "topics.tsv").string());
  if (uses_lambda(cfg.kind)) write_lambda_tsv(c, (out / "lambdas.tsv").string());
  write_run_config(sub, out);
}

struct NpmiArgs {
  std::string model;
  std::string reference;
  std::vector<int32_t> cardinalities = {5, 10, 15};
  int32_t window = 10;
  std::string output;
};

void run_eval_npmi(const NpmiArgs& a, CLI::App* sub) {
  fs::path out = prepare_outdir(a.output);
  ModelArtifact art = load_model(a.model);
  Corpus ref = load_corpus(a.reference);
  Matrix<double> phi_l1, phi_l2;
  fill_phi(art.state.psi_l1, art.state.rowsum_l1, art.state.config.beta, phi_l1);
  fill_phi(art.state.psi_l2, art.state.rowsum_l2, art.state.config.beta, phi_l2);
  CoherenceReport r1 = npmi_for_model(phi_l1, art.vocab_l1, ref, 0, a.cardinalities, a.window);
  CoherenceReport r2 = npmi_for_model(phi_l2, art.vocab_l2, ref, 1, a.cardinalities, a.window);
  write_coherence_tsv(r1, (out / "npmi_l1.tsv").string());
  write_coherence_tsv(r2, (out / "npmi_l2.tsv").string());
  std::ostringstream os;
  os << "language " << ref.vocab_l1.language << "\n" << coherence_summary(r1);
  os << "language " << ref.vocab_l2.language << "\n" << coherence_summary(r2);
  write_text(out / "npmi_summary.txt", os.str());
  write_run_config(sub, out);
}

struct PerplexityArgs {
  std::string corpus;
  std::string model = "bilda";
  std::string segments;
  std::vector<int32_t> topics;
  double alpha = 0.0;
  double beta = 0.01;
  int32_t iters = 200;
  int32_t infer_iters = 100;
  int32_t folds = 10;
  uint64_t seed = 0;
  std::string embeddings_l1;
  std::string embeddings_l2;
  int32_t top_bigrams = 1000;
  int threads = 1;
  std::string output;
};

void run_eval_perplexity(const PerplexityArgs& a, CLI::App* sub) {
  fs::path out = prepare_outdir(a.output);
  Corpus c = load_corpus(a.corpus);
  if (!a.segments.empty())
    apply_segmentation(c, segmentation_mode_from_string(a.segments), a.top_bigrams);
  const ModelKind kind = model_kind_from_string(a.model);
  attach_lambdas(c, kind, a.embeddings_l1, a.embeddings_l2);
  std::ostringstream summary;
  for (int32_t k : a.topics) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.topics = k;
    cfg.alpha = a.alpha;
    cfg.beta = a.beta;
    cfg.train_iters = a.iters;
    cfg.infer_iters = a.infer_iters;
    cfg.seed = a.seed;
    PerplexityReport report = crossval_perplexity(c, cfg, a.folds, a.threads);
    std::ostringstream name;
    name << "perplexity_k" << k << ".tsv";
    write_perplexity_tsv(report, (out / name.str()).string());
    summary << "topics\t" << k << '\n' << perplexity_summary(report) << '\n';
  }
  write_text(out / "perplexity_summary.txt", summary.str());
  write_run_config(sub, out);
}

struct ClddArgs {
  std::string model;
  std::string heldout;
  int32_t queries = 500;
  int32_t repeats = 10;
  std::string kl_direction = "query-to-candidate";
  int32_t infer_iters = 100;
  uint64_t seed = 0;
  int threads = 1;
  std::string output;
};

void run_eval_cldd(const ClddArgs& a, CLI::App* sub) {
  fs::path out = prepare_outdir(a.output);
  ModelArtifact art = load_model(a.model);
  Corpus heldout = load_corpus(a.heldout);
  RetrievalReport r = cldd(art.state, heldout, a.seed, a.queries, a.repeats,
                           kl_direction_from_string(a.kl_direction), a.infer_iters, a.threads);
  write_retrieval_tsv(r, (out / "cldd.tsv").string());
  write_text(out / "cldd_summary.txt", retrieval_summary(r));
  write_run_config(sub, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilingual topic models over comparable document pairs"};
  app.require_subcommand(1);
  // Defaults are captured so every run_config.cfg replays with the exact
  // values the run resolved, not whatever a later build's defaults are.
  app.option_defaults()->always_capture_default(true);
  // Replay: bitopic --config <dir>/run_config.cfg reruns the recorded
  // subcommand; explicit flags still win over file values.
  app.set_config("--config", "", "run configuration to replay");

  PreprocessArgs pre;
  CLI::App* sub_pre = app.add_subcommand("preprocess", "encode a paired jsonl corpus");
  sub_pre->configurable(true);
  sub_pre->add_option("--input", pre.input, "paired jsonl input")->required();
  sub_pre->add_option("--output", pre.output, "output directory")->required();
  sub_pre->add_option("--mode", pre.mode, "segmentation mode")
      ->check(CLI::IsMember({"word", "sentence", "bigram"}));
  sub_pre->add_option("--top-bigrams", pre.top_bigrams, "bigrams kept per language");
  sub_pre->add_option("--stopwords-l1", pre.stopwords_l1, "stopword file, first language");
  sub_pre->add_option("--stopwords-l2", pre.stopwords_l2, "stopword file, second language");
  sub_pre->add_option("--min-count", pre.min_count, "corpus-global minimum token count");
  sub_pre->add_option("--lang-l1", pre.lang_l1, "label of the first language");
  sub_pre->add_option("--lang-l2", pre.lang_l2, "label of the second language");

  SplitArgs spl;
  CLI::App* sub_split = app.add_subcommand("split", "split a corpus into train and held-out parts");
  sub_split->configurable(true);
  sub_split->add_option("--corpus", spl.corpus, "corpus artifact")->required();
  sub_split->add_option("--output", spl.output, "output directory")->required();
  sub_split->add_option("--heldout", spl.heldout, "held-out pair count")->required();
  sub_split->add_option("--seed", spl.seed, "selection seed")->required();

  TrainArgs tra;
  CLI::App* sub_train = app.add_subcommand("train", "train one model on a corpus artifact");
  sub_train->configurable(true);
  sub_train->add_option("--corpus", tra.corpus, "corpus artifact")->required();
  sub_train->add_option("--model", tra.model, "model kind")
      ->check(CLI::IsMember({"bilda", "seg", "lambda-bilda", "lambda-seg"}));
  sub_train->add_option("--segments", tra.segments,
                        "re-segment the corpus before training (word, sentence, bigram)");
  sub_train->add_option("--topics", tra.topics, "topic count K")->required();
  sub_train->add_option("--alpha", tra.alpha, "document Dirichlet prior, default 1/K");
  sub_train->add_option("--beta", tra.beta, "topic-word Dirichlet prior");
  sub_train->add_option("--iters", tra.iters, "training sweeps");
  sub_train->add_option("--infer-iters", tra.infer_iters, "default held-out sweeps");
  sub_train->add_option("--seed", tra.seed, "training seed")->required();
  sub_train->add_option("--embeddings-l1", tra.embeddings_l1, "embedding file, first language");
  sub_train->add_option("--embeddings-l2", tra.embeddings_l2, "embedding file, second language");
  sub_train->add_option("--top-words", tra.top_words, "words per topic in the topic dump");
  sub_train->add_option("--top-bigrams", tra.top_bigrams, "bigrams kept when re-segmenting");
  sub_train->add_option("--output", tra.output, "output directory")->required();

  NpmiArgs npm;
  CLI::App* sub_npmi = app.add_subcommand("eval-npmi", "topic coherence against a reference corpus");
  sub_npmi->configurable(true);
  sub_npmi->add_option("--model", npm.model, "model artifact")->required();
  sub_npmi->add_option("--reference", npm.reference, "reference corpus artifact")->required();
  sub_npmi->add_option("--cardinalities", npm.cardinalities, "top-word counts")->delimiter(',');
  sub_npmi->add_option("--window", npm.window, "sliding-window width");
  sub_npmi->add_option("--output", npm.output, "output directory")->required();

  PerplexityArgs per;
  CLI::App* sub_perp = app.add_subcommand("eval-perplexity", "k-fold held-out perplexity");
  sub_perp->configurable(true);
  sub_perp->add_option("--corpus", per.corpus, "corpus artifact")->required();
  sub_perp->add_option("--model", per.model, "model kind")
      ->check(CLI::IsMember({"bilda", "seg", "lambda-bilda", "lambda-seg"}));
  sub_perp->add_option("--segments", per.segments,
                       "re-segment the corpus first (word, sentence, bigram)");
  sub_perp->add_option("--topics", per.topics, "topic counts, comma separated")
      ->required()
      ->delimiter(',');
  sub_perp->add_option("--alpha", per.alpha, "document Dirichlet prior, default 1/K");
  sub_perp->add_option("--beta", per.beta, "topic-word Dirichlet prior");
  sub_perp->add_option("--iters", per.iters, "training sweeps per fold");
  sub_perp->add_option("--infer-iters", per.infer_iters, "held-out sweeps");
  sub_perp->add_option("--folds", per.folds, "fold count");
  sub_perp->add_option("--seed", per.seed, "seed for folds, training and inference")->required();
  sub_perp->add_option("--embeddings-l1", per.embeddings_l1, "embedding file, first language");
  sub_perp->add_option("--embeddings-l2", per.embeddings_l2, "embedding file, second language");
  sub_perp->add_option("--top-bigrams", per.top_bigrams, "bigrams kept when re-segmenting");
  sub_perp->add_option("--threads", per.threads, "held-out inference threads");
  sub_perp->add_option("--output", per.output, "output directory")->required();

  ClddArgs cld;
  CLI::App* sub_cldd = app.add_subcommand("eval-cldd", "cross-lingual document discovery");
  sub_cldd->configurable(true);
  sub_cldd->add_option("--model", cld.model, "model artifact")->required();
  sub_cldd->add_option("--heldout", cld.heldout, "held-out corpus artifact")->required();
  sub_cldd->add_option("--queries", cld.queries, "pairs sampled per repeat");
  sub_cldd->add_option("--repeats", cld.repeats, "sampling repeats");
  sub_cldd->add_option("--kl-direction", cld.kl_direction, "ranking KL direction")
      ->check(CLI::IsMember({"query-to-candidate", "candidate-to-query"}));
  sub_cldd->add_option("--infer-iters", cld.infer_iters, "held-out sweeps");
  sub_cldd->add_option("--seed", cld.seed, "seed for inference and sampling")->required();
  sub_cldd->add_option("--threads", cld.threads, "held-out inference threads");
  sub_cldd->add_option("--output", cld.output, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sub_pre->parsed()) run_preprocess(pre, sub_pre);
    if (sub_split->parsed()) run_split(spl, sub_split);
    if (sub_train->parsed()) run_train(tra, sub_train);
    if (sub_npmi->parsed()) run_eval_npmi(npm, sub_npmi);
    if (sub_perp->parsed()) run_eval_perplexity(per, sub_perp);
    if (sub_cldd->parsed()) run_eval_cldd(cld, sub_cldd);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
