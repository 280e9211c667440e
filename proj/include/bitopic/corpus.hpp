#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitopic/vocabulary.hpp"

namespace bitopic {

enum class SegmentationMode { Word, Sentence, Bigram };

inline const char* to_string(SegmentationMode m) {
  switch (m) {
    case SegmentationMode::Word: return "word";
    case SegmentationMode::Sentence: return "sentence";
    case SegmentationMode::Bigram: return "bigram";
  }
  return "?";
}

inline SegmentationMode segmentation_mode_from_string(const std::string& s) {
  if (s == "word") return SegmentationMode::Word;
  if (s == "sentence") return SegmentationMode::Sentence;
  if (s == "bigram") return SegmentationMode::Bigram;
  throw std::runtime_error("unknown segmentation mode '" + s + "'");
}

// A document is a flat word-id sequence with two partitions over it: the
// sentence boundaries carried over from the input record, and the current
// topical segmentation. Both are offset arrays of size count+1 covering
// [0, words.size()) without gaps.
struct Document {
  std::vector<int32_t> words;
  std::vector<int32_t> sentences;  // sentence offsets
  std::vector<int32_t> segments;   // segment offsets

  int32_t word_count() const { return static_cast<int32_t>(words.size()); }
  int32_t sentence_count() const { return static_cast<int32_t>(sentences.size()) - 1; }
  int32_t segment_count() const { return static_cast<int32_t>(segments.size()) - 1; }

  std::span<const int32_t> segment(int32_t j) const {
    return {words.data() + segments[static_cast<std::size_t>(j)],
            words.data() + segments[static_cast<std::size_t>(j) + 1]};
  }
  std::span<const int32_t> sentence(int32_t s) const {
    return {words.data() + sentences[static_cast<std::size_t>(s)],
            words.data() + sentences[static_cast<std::size_t>(s) + 1]};
  }
};

// Offsets [0, 1, ..., n]: every word its own segment.
inline std::vector<int32_t> singleton_offsets(int32_t n) {
  std::vector<int32_t> off(static_cast<std::size_t>(n) + 1);
  for (int32_t i = 0; i <= n; ++i) off[static_cast<std::size_t>(i)] = i;
  return off;
}

struct DocumentPair {
  std::string pair_id;
  Document doc_l1;
  Document doc_l2;
  std::optional<double> lambda;  // cross-lingual binding strength, set by the lambda models
};

struct Corpus {
  Vocabulary vocab_l1;
  Vocabulary vocab_l2;
  std::vector<DocumentPair> pairs;
  SegmentationMode segmentation = SegmentationMode::Word;
  bool has_sentences = false;  // every input record carried explicit sentence arrays
  int32_t min_count = 4;       // the min-count filter the vocabularies were built with

  int64_t pair_count() const { return static_cast<int64_t>(pairs.size()); }

  const Vocabulary& vocab(int lang) const { return lang == 0 ? vocab_l1 : vocab_l2; }
  static const Document& doc(const DocumentPair& p, int lang) { return lang == 0 ? p.doc_l1 : p.doc_l2; }

  int64_t total_words(int lang) const {
    int64_t n = 0;
    for (const auto& p : pairs) n += doc(p, lang).word_count();
    return n;
  }
};

namespace detail {

inline void check_offsets(const std::vector<int32_t>& off, int32_t n, const char* what) {
  if (off.empty() || off.front() != 0 || off.back() != n)
    throw std::runtime_error(std::string(what) + ": offsets do not cover the document");
  for (std::size_t i = 1; i < off.size(); ++i) {
    if (off[i] <= off[i - 1]) throw std::runtime_error(std::string(what) + ": empty or unordered span");
  }
}

}  // namespace detail

inline void validate_document(const Document& d, int32_t vocab_size) {
  for (int32_t w : d.words) {
    if (w < 0 || w >= vocab_size) throw std::runtime_error("document: word id out of range");
  }
  if (d.word_count() == 0) {
    if (d.sentences != std::vector<int32_t>{0} || d.segments != std::vector<int32_t>{0})
      throw std::runtime_error("document: empty document with non-trivial partitions");
    return;
  }
  detail::check_offsets(d.sentences, d.word_count(), "sentences");
  detail::check_offsets(d.segments, d.word_count(), "segments");
}

inline void validate_corpus(const Corpus& c) {
  for (const auto& p : c.pairs) {
    validate_document(p.doc_l1, c.vocab_l1.size());
    validate_document(p.doc_l2, c.vocab_l2.size());
    if (p.lambda && (*p.lambda < 0.0 || *p.lambda > 1.0))
      throw std::runtime_error("pair " + p.pair_id + ": lambda outside [0,1]");
  }
}

}  // namespace bitopic
