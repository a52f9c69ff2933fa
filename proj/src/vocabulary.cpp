#include "lexinduce/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "lexinduce/error.hpp"

namespace lexinduce {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  words_.emplace_back(kUnk);
  index_.emplace(std::string(kUnk), 0);
  for (const auto& w : words) {
    if (w == kUnk) continue;
    auto [it, inserted] = index_.emplace(w, static_cast<WordId>(words_.size()));
    if (!inserted) throw InputError("duplicate vocabulary entry: " + w);
    words_.push_back(w);
  }
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sentences,
                             int min_count) {
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& sentence : sentences) {
    for (std::string w : sentence) {
      std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
      if (counts[w]++ == 0) order.push_back(w);
    }
  }
  std::vector<std::string> kept;
  for (const auto& w : order) {
    if (counts[w] >= min_count) kept.push_back(w);
  }
  return Vocabulary(kept);
}

WordId Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? unk_id() : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
  return index_.count(std::string(word)) > 0;
}

const std::string& Vocabulary::word(WordId id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("word id out of range");
  return words_[static_cast<size_t>(id)];
}

}  // namespace lexinduce
