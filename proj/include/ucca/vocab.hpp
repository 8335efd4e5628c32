#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace ucca {

// String -> row index with a reserved unknown entry at 0.
class StringVocab {
 public:
  static constexpr const char* kUnknown = "<UNK>";

  StringVocab();
  // entries[0] must be the unknown marker.
  explicit StringVocab(const std::vector<std::string>& entries);

  int add(const std::string& s);
  // 0 when absent.
  int index(const std::string& s) const;
  bool contains(const std::string& s) const { return index_.count(s) != 0; }
  const std::string& at(int i) const { return entries_.at(static_cast<std::size_t>(i)); }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<std::string>& entries() const { return entries_; }

  friend bool operator==(const StringVocab&, const StringVocab&) = default;

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> index_;
};

nlohmann::json vocab_to_json(const std::vector<std::string>& entries);
std::vector<std::string> vocab_entries_from_json(const nlohmann::json& j);

}  // namespace ucca
