#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexinduce {

using WordId = int;

// Closed word inventory. Id 0 is always the unknown-word token.
class Vocabulary {
 public:
  static constexpr std::string_view kUnk = "<unk>";

  Vocabulary();
  // `words` may or may not start with kUnk; it is prepended when absent.
  explicit Vocabulary(const std::vector<std::string>& words);

  // Lowercased; words seen fewer than `min_count` times map to UNK. Order is first
  // occurrence, so the result is deterministic for a given corpus.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sentences,
                          int min_count);

  WordId id(std::string_view word) const;  // UNK for out-of-vocabulary
  bool contains(std::string_view word) const;
  const std::string& word(WordId id) const;
  WordId unk_id() const { return 0; }
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

}  // namespace lexinduce
