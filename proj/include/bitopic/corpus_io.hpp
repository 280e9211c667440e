#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "bitopic/corpus.hpp"
#include "bitopic/segmentation.hpp"
#include "bitopic/vocabulary.hpp"

namespace bitopic {

struct PreprocessConfig {
  std::string stopwords_l1;  // empty path: no stopword filtering for that side
  std::string stopwords_l2;
  int32_t min_count = 4;
  std::string language_l1 = "l1";
  std::string language_l2 = "l2";
};

struct LoadReport {
  int64_t records = 0;
  int64_t tokens_seen = 0;
  int64_t numeric_dropped = 0;
  int64_t stopword_dropped = 0;
  int64_t mincount_dropped = 0;
  int64_t empty_sentences_removed = 0;
  int64_t pairs_dropped_empty = 0;

  std::string summary() const {
    std::ostringstream os;
    os << "records=" << records << " tokens=" << tokens_seen
       << " dropped_numeric=" << numeric_dropped
       << " dropped_stopword=" << stopword_dropped
       << " dropped_mincount=" << mincount_dropped
       << " empty_sentences_removed=" << empty_sentences_removed
       << " pairs_dropped_empty=" << pairs_dropped_empty;
    return os.str();
  }
};

inline std::string ascii_lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// Numeric tokens are built from digits plus separators and signs, with at
// least one digit: "42", "3.14", "1,000", "-7", "+1.5e" is not (has a letter).
inline bool is_numeric_token(const std::string& s) {
  bool has_digit = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      has_digit = true;
    } else if (c != '.' && c != ',' && c != '+' && c != '-') {
      return false;
    }
  }
  return has_digit;
}

inline bool has_whitespace(const std::string& s) {
  for (unsigned char c : s) {
    if (std::isspace(c)) return true;
  }
  return false;
}

inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::unordered_set<std::string> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.insert(ascii_lower(line));
  }
  return out;
}

namespace detail {

// One side of one record after the per-token filters, still as strings.
struct RawDoc {
  std::vector<std::vector<std::string>> sentences;
  bool had_boundaries = true;
};

inline RawDoc parse_side(const nlohmann::json& j, const std::unordered_set<std::string>& stop,
                         LoadReport& report, int64_t line_no, const char* side) {
  RawDoc doc;
  auto bad = [&](const std::string& why) {
    std::ostringstream os;
    os << "line " << line_no << ": field '" << side << "' " << why;
    return std::runtime_error(os.str());
  };
  if (!j.is_array()) throw bad("is not an array");

  auto add_sentence = [&](const nlohmann::json& sent) {
    std::vector<std::string> tokens;
    for (const auto& t : sent) {
      if (!t.is_string()) throw bad("contains a non-string token");
      std::string tok = ascii_lower(t.get<std::string>());
      if (has_whitespace(tok)) throw bad("contains a token with whitespace");
      ++report.tokens_seen;
      if (tok.empty() || is_numeric_token(tok)) {
        ++report.numeric_dropped;
        continue;
      }
      if (stop.count(tok)) {
        ++report.stopword_dropped;
        continue;
      }
      tokens.push_back(std::move(tok));
    }
    doc.sentences.push_back(std::move(tokens));
  };

  bool flat = false;
  for (const auto& e : j) {
    if (e.is_string()) {
      flat = true;
      break;
    }
    if (!e.is_array()) throw bad("mixes sentences with non-array entries");
  }
  if (flat) {
    // A flat token array is tolerated as one boundary-free document; such
    // corpora cannot be segmented by sentence or bigram.
    doc.had_boundaries = false;
    add_sentence(j);
  } else {
    for (const auto& sent : j) add_sentence(sent);
  }
  return doc;
}

struct RawPair {
  std::string id;
  RawDoc l1;
  RawDoc l2;
};

inline Document build_document(const RawDoc& raw, const Vocabulary& vocab, LoadReport& report) {
  Document d;
  d.sentences.push_back(0);
  for (const auto& sent : raw.sentences) {
    int32_t before = d.word_count();
    for (const auto& tok : sent) {
      int32_t id = vocab.id_of(tok);
      if (id < 0) {
        ++report.mincount_dropped;
        continue;
      }
      d.words.push_back(id);
    }
    if (d.word_count() == before) {
      // Sentence emptied by the filters; a flat record's single pseudo
      // sentence is not counted, its pair is dropped as empty instead.
      if (raw.had_boundaries) ++report.empty_sentences_removed;
      continue;
    }
    d.sentences.push_back(d.word_count());
  }
  d.segments = singleton_offsets(d.word_count());
  return d;
}

}  // namespace detail

// Reads the paired jsonl format, applies the token filters in order
// (lowercase, numeric drop, stopword drop, corpus-global min-count), builds
// both vocabularies, and drops pairs left empty on either side.
inline Corpus load_pairs(const std::string& path, const PreprocessConfig& config,
                         LoadReport* report_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file '" + path + "'");
  auto stop_l1 = load_stopwords(config.stopwords_l1);
  auto stop_l2 = load_stopwords(config.stopwords_l2);
  if (config.min_count < 1) throw std::runtime_error("min_count must be at least 1");

  LoadReport report;
  std::vector<detail::RawPair> raws;
  bool all_boundaries = true;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      std::ostringstream os;
      os << "line " << line_no << ": invalid JSON (" << e.what() << ")";
      throw std::runtime_error(os.str());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("l1") || !j.contains("l2")) {
      std::ostringstream os;
      os << "line " << line_no << ": record needs fields id, l1, l2";
      throw std::runtime_error(os.str());
    }
    if (!j["id"].is_string()) {
      std::ostringstream os;
      os << "line " << line_no << ": field 'id' must be a string";
      throw std::runtime_error(os.str());
    }
    detail::RawPair rp;
    rp.id = j["id"].get<std::string>();
    rp.l1 = detail::parse_side(j["l1"], stop_l1, report, line_no, "l1");
    rp.l2 = detail::parse_side(j["l2"], stop_l2, report, line_no, "l2");
    all_boundaries = all_boundaries && rp.l1.had_boundaries && rp.l2.had_boundaries;
    raws.push_back(std::move(rp));
    ++report.records;
  }

  // Corpus-global counts per language for the min-count filter.
  std::unordered_map<std::string, int64_t> count_l1, count_l2;
  for (const auto& rp : raws) {
    for (const auto& sent : rp.l1.sentences)
      for (const auto& tok : sent) ++count_l1[tok];
    for (const auto& sent : rp.l2.sentences)
      for (const auto& tok : sent) ++count_l2[tok];
  }

  Corpus c;
  c.min_count = config.min_count;
  c.has_sentences = all_boundaries;
  c.vocab_l1.language = config.language_l1;
  c.vocab_l2.language = config.language_l2;

  // Ids assigned in first-appearance order over the record stream, which makes
  // the vocabulary independent of hash iteration order.
  auto build_vocab = [&](Vocabulary& vocab, const std::unordered_map<std::string, int64_t>& counts,
                         auto&& side_of) {
    for (const auto& rp : raws) {
      for (const auto& sent : side_of(rp).sentences) {
        for (const auto& tok : sent) {
          if (vocab.id_of(tok) >= 0) continue;
          auto it = counts.find(tok);
          if (it->second >= config.min_count) vocab.add(tok, it->second);
        }
      }
    }
  };
  build_vocab(c.vocab_l1, count_l1, [](const detail::RawPair& rp) -> const detail::RawDoc& { return rp.l1; });
  build_vocab(c.vocab_l2, count_l2, [](const detail::RawPair& rp) -> const detail::RawDoc& { return rp.l2; });

  for (const auto& rp : raws) {
    DocumentPair p;
    p.pair_id = rp.id;
    p.doc_l1 = detail::build_document(rp.l1, c.vocab_l1, report);
    p.doc_l2 = detail::build_document(rp.l2, c.vocab_l2, report);
    if (p.doc_l1.word_count() == 0 || p.doc_l2.word_count() == 0) {
      ++report.pairs_dropped_empty;
      continue;
    }
    c.pairs.push_back(std::move(p));
  }
  if (c.pairs.empty()) throw std::runtime_error("no pairs survive preprocessing");
  validate_corpus(c);
  if (report_out) *report_out = report;
  return c;
}

// ---- corpus serialization, versioned plain text ----
//
//   bitopic-corpus 1
//   languages <l1> <l2>
//   segmentation <mode>
//   min_count <n>
//   has_sentences <0|1>
//   vocab <lang> <V> then V lines of "<token> <frequency>"
//   pairs <P> then per pair a header line
//     pair <n1> <s1> <j1> <n2> <s2> <j2> <lambda|-> <id>
//   followed by six lines of whitespace-separated offsets/ids.
//
// Doubles are written as C hexfloats so a save/load/save cycle is
// byte-identical.

inline std::string double_to_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline double double_from_text(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("bad float literal '" + s + "'");
  return v;
}

namespace detail {

inline void write_ints(std::ostream& os, const std::vector<int32_t>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << v[i];
  }
  os << '\n';
}

inline std::vector<int32_t> read_ints(std::istream& is, std::size_t n, const char* what) {
  std::vector<int32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> v[i])) throw std::runtime_error(std::string("corpus file: truncated ") + what);
  }
  return v;
}

inline void write_vocab(std::ostream& os, const Vocabulary& vocab) {
  os << "vocab " << vocab.language << ' ' << vocab.size() << '\n';
  for (int32_t i = 0; i < vocab.size(); ++i) {
    os << vocab.token(i) << ' ' << vocab.frequency[static_cast<std::size_t>(i)] << '\n';
  }
}

inline Vocabulary read_vocab(std::istream& is) {
  std::string tag;
  if (!(is >> tag) || tag != "vocab") throw std::runtime_error("corpus file: expected vocab block");
  Vocabulary vocab;
  int32_t size = 0;
  if (!(is >> vocab.language >> size)) throw std::runtime_error("corpus file: bad vocab header");
  for (int32_t i = 0; i < size; ++i) {
    std::string token;
    int64_t freq = 0;
    if (!(is >> token >> freq)) throw std::runtime_error("corpus file: truncated vocab");
    vocab.add(token, freq);
  }
  return vocab;
}

}  // namespace detail

inline void save_corpus(const Corpus& c, std::ostream& os) {
  os << "bitopic-corpus 1\n";
  os << "languages " << c.vocab_l1.language << ' ' << c.vocab_l2.language << '\n';
  os << "segmentation " << to_string(c.segmentation) << '\n';
  os << "min_count " << c.min_count << '\n';
  os << "has_sentences " << (c.has_sentences ? 1 : 0) << '\n';
  detail::write_vocab(os, c.vocab_l1);
  detail::write_vocab(os, c.vocab_l2);
  os << "pairs " << c.pairs.size() << '\n';
  for (const auto& p : c.pairs) {
    if (has_whitespace(p.pair_id) || p.pair_id.empty())
      throw std::runtime_error("pair id '" + p.pair_id + "' cannot be serialized");
    os << "pair " << p.doc_l1.word_count() << ' ' << p.doc_l1.sentence_count() << ' '
       << p.doc_l1.segment_count() << ' ' << p.doc_l2.word_count() << ' '
       << p.doc_l2.sentence_count() << ' ' << p.doc_l2.segment_count() << ' '
       << (p.lambda ? double_to_text(*p.lambda) : std::string("-")) << ' ' << p.pair_id << '\n';
    for (const Document* d : {&p.doc_l1, &p.doc_l2}) {
      detail::write_ints(os, d->words);
      detail::write_ints(os, d->sentences);
      detail::write_ints(os, d->segments);
    }
  }
}

inline void save_corpus(const Corpus& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_corpus(c, os);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline Corpus load_corpus(std::istream& is) {
  std::string magic, version;
  if (!(is >> magic >> version) || magic != "bitopic-corpus" || version != "1")
    throw std::runtime_error("not a bitopic-corpus version 1 file");
  Corpus c;
  std::string tag, mode;
  int has_sentences = 0;
  if (!(is >> tag >> c.vocab_l1.language >> c.vocab_l2.language) || tag != "languages")
    throw std::runtime_error("corpus file: bad languages line");
  if (!(is >> tag >> mode) || tag != "segmentation")
    throw std::runtime_error("corpus file: bad segmentation line");
  c.segmentation = segmentation_mode_from_string(mode);
  if (!(is >> tag >> c.min_count) || tag != "min_count")
    throw std::runtime_error("corpus file: bad min_count line");
  if (!(is >> tag >> has_sentences) || tag != "has_sentences")
    throw std::runtime_error("corpus file: bad has_sentences line");
  c.has_sentences = has_sentences != 0;
  Vocabulary v1 = detail::read_vocab(is);
  Vocabulary v2 = detail::read_vocab(is);
  v1.language = c.vocab_l1.language;
  v2.language = c.vocab_l2.language;
  c.vocab_l1 = std::move(v1);
  c.vocab_l2 = std::move(v2);
  int64_t pair_count = 0;
  if (!(is >> tag >> pair_count) || tag != "pairs")
    throw std::runtime_error("corpus file: bad pairs line");
  c.pairs.reserve(static_cast<std::size_t>(pair_count));
  for (int64_t i = 0; i < pair_count; ++i) {
    if (!(is >> tag) || tag != "pair") throw std::runtime_error("corpus file: expected pair header");
    int32_t n1, s1, j1, n2, s2, j2;
    std::string lam, id;
    if (!(is >> n1 >> s1 >> j1 >> n2 >> s2 >> j2 >> lam >> id))
      throw std::runtime_error("corpus file: bad pair header");
    DocumentPair p;
    p.pair_id = id;
    if (lam != "-") p.lambda = double_from_text(lam);
    for (Document* d : {&p.doc_l1, &p.doc_l2}) {
      int32_t n = d == &p.doc_l1 ? n1 : n2;
      int32_t s = d == &p.doc_l1 ? s1 : s2;
      int32_t j = d == &p.doc_l1 ? j1 : j2;
      d->words = detail::read_ints(is, static_cast<std::size_t>(n), "words");
      d->sentences = detail::read_ints(is, static_cast<std::size_t>(s) + 1, "sentences");
      d->segments = detail::read_ints(is, static_cast<std::size_t>(j) + 1, "segments");
    }
    c.pairs.push_back(std::move(p));
  }
  validate_corpus(c);
  return c;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open corpus file '" + path + "'");
  return load_corpus(is);
}

inline void write_vocab_tsv(const Vocabulary& vocab, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "id\ttoken\tfrequency\n";
  for (int32_t i = 0; i < vocab.size(); ++i) {
    os << i << '\t' << vocab.token(i) << '\t' << vocab.frequency[static_cast<std::size_t>(i)] << '\n';
  }
}

inline void write_bigrams_tsv(const std::vector<BigramCount>& bigrams, const Vocabulary& vocab,
                              const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << "first\tsecond\tcount\n";
  for (const auto& b : bigrams) {
    os << vocab.token(b.first) << '\t' << vocab.token(b.second) << '\t' << b.count << '\n';
  }
}

}  // namespace bitopic
