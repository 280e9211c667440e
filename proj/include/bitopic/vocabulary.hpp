#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bitopic {

// Dense-id token table for one language. Ids are contiguous in [0, size());
// token_to_id and id_to_token are exact inverses. frequency holds the corpus
// count observed when the vocabulary was built (the count the min-count filter
// was applied to).
struct Vocabulary {
  std::string language;
  std::unordered_map<std::string, int32_t> token_to_id;
  std::vector<std::string> id_to_token;
  std::vector<int64_t> frequency;

  int32_t size() const { return static_cast<int32_t>(id_to_token.size()); }

  int32_t add(const std::string& token, int64_t freq) {
    auto [it, inserted] = token_to_id.emplace(token, size());
    if (!inserted) throw std::runtime_error("vocabulary: duplicate token '" + token + "'");
    id_to_token.push_back(token);
    frequency.push_back(freq);
    return it->second;
  }

  // -1 when absent.
  int32_t id_of(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? -1 : it->second;
  }

  const std::string& token(int32_t id) const { return id_to_token.at(static_cast<std::size_t>(id)); }
};

}  // namespace bitopic
