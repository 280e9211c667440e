#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bitopic/corpus.hpp"

namespace bitopic {

// Segments follow the sentence partition unchanged.
inline void segment_by_sentences(Document& d) { d.segments = d.sentences; }

inline void segment_by_words(Document& d) { d.segments = singleton_offsets(d.word_count()); }

struct BigramCount {
  int32_t first = 0;
  int32_t second = 0;
  int64_t count = 0;
};

// Adjacent pairs within a sentence; pairs never straddle sentence boundaries.
inline std::map<std::pair<int32_t, int32_t>, int64_t> count_bigrams(const Corpus& c, int lang) {
  std::map<std::pair<int32_t, int32_t>, int64_t> counts;
  for (const auto& p : c.pairs) {
    const Document& d = Corpus::doc(p, lang);
    for (int32_t s = 0; s < d.sentence_count(); ++s) {
      auto span = d.sentence(s);
      for (std::size_t i = 0; i + 1 < span.size(); ++i) {
        ++counts[{span[i], span[i + 1]}];
      }
    }
  }
  return counts;
}

// Most frequent bigrams, count descending, ties by (first, second) id order.
inline std::vector<BigramCount> top_bigrams(const std::map<std::pair<int32_t, int32_t>, int64_t>& counts,
                                            int32_t limit) {
  std::vector<BigramCount> all;
  all.reserve(counts.size());
  for (const auto& [key, n] : counts) all.push_back({key.first, key.second, n});
  std::stable_sort(all.begin(), all.end(), [](const BigramCount& a, const BigramCount& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  if (static_cast<int32_t>(all.size()) > limit) all.resize(static_cast<std::size_t>(limit));
  return all;
}

// Greedy left to right within each sentence: if (w[i], w[i+1]) is a selected
// bigram, both words form one segment and scanning resumes at i+2, so selected
// occurrences never overlap. Everything else is a singleton segment.
inline void segment_by_bigrams(Document& d, const std::vector<BigramCount>& selected) {
  std::map<std::pair<int32_t, int32_t>, bool> chosen;
  for (const auto& b : selected) chosen[{b.first, b.second}] = true;

  std::vector<int32_t> off;
  off.push_back(0);
  for (int32_t s = 0; s < d.sentence_count(); ++s) {
    int32_t begin = d.sentences[static_cast<std::size_t>(s)];
    int32_t end = d.sentences[static_cast<std::size_t>(s) + 1];
    int32_t i = begin;
    while (i < end) {
      if (i + 1 < end && chosen.count({d.words[static_cast<std::size_t>(i)],
                                       d.words[static_cast<std::size_t>(i) + 1]})) {
        off.push_back(i + 2);
        i += 2;
      } else {
        off.push_back(i + 1);
        i += 1;
      }
    }
  }
  d.segments = std::move(off);
}

struct BigramLists {
  std::vector<BigramCount> l1;
  std::vector<BigramCount> l2;
};

inline void require_sentences(const Corpus& c, SegmentationMode mode) {
  if (!c.has_sentences)
    throw std::runtime_error("segmentation mode '" + std::string(to_string(mode)) +
                             "' needs sentence boundaries in the input");
}

inline void segment_words(Corpus& c) {
  c.segmentation = SegmentationMode::Word;
  for (auto& p : c.pairs) {
    segment_by_words(p.doc_l1);
    segment_by_words(p.doc_l2);
  }
}

inline void segment_sentences(Corpus& c) {
  require_sentences(c, SegmentationMode::Sentence);
  c.segmentation = SegmentationMode::Sentence;
  for (auto& p : c.pairs) {
    segment_by_sentences(p.doc_l1);
    segment_by_sentences(p.doc_l2);
  }
}

// Per language: selects the top_n most frequent within-sentence bigrams, then
// re-partitions every document around their occurrences. Returns the selected
// lists for reporting.
inline BigramLists segment_bigrams(Corpus& c, int32_t top_n = 1000) {
  if (top_n <= 0) throw std::runtime_error("bigram count must be positive");
  require_sentences(c, SegmentationMode::Bigram);
  c.segmentation = SegmentationMode::Bigram;
  BigramLists lists;
  for (int lang = 0; lang < 2; ++lang) {
    auto counts = count_bigrams(c, lang);
    auto selected = top_bigrams(counts, top_n);
    for (auto& p : c.pairs) {
      segment_by_bigrams(lang == 0 ? p.doc_l1 : p.doc_l2, selected);
    }
    (lang == 0 ? lists.l1 : lists.l2) = std::move(selected);
  }
  return lists;
}

// Applies the corpus segmentation mode to every document.
inline void apply_segmentation(Corpus& c, SegmentationMode mode, int32_t bigram_limit = 1000) {
  switch (mode) {
    case SegmentationMode::Word: segment_words(c); break;
    case SegmentationMode::Sentence: segment_sentences(c); break;
    case SegmentationMode::Bigram: segment_bigrams(c, bigram_limit); break;
  }
}

}  // namespace bitopic
