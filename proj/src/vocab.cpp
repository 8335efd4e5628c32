#include "ucca/vocab.hpp"

#include <stdexcept>

namespace ucca {

StringVocab::StringVocab() : StringVocab(std::vector<std::string>{kUnknown}) {}

StringVocab::StringVocab(const std::vector<std::string>& entries) {
  if (entries.empty() || entries[0] != kUnknown) {
    throw std::invalid_argument(std::string("vocabulary must start with ") + kUnknown);
  }
  for (const auto& e : entries) {
    if (index_.count(e)) throw std::invalid_argument("duplicate vocabulary entry '" + e + "'");
    index_.emplace(e, static_cast<int>(entries_.size()));
    entries_.push_back(e);
  }
}

int StringVocab::add(const std::string& s) {
  auto [it, inserted] = index_.emplace(s, static_cast<int>(entries_.size()));
  if (inserted) entries_.push_back(s);
  return it->second;
}

int StringVocab::index(const std::string& s) const {
  auto it = index_.find(s);
  return it == index_.end() ? 0 : it->second;
}

nlohmann::json vocab_to_json(const std::vector<std::string>& entries) { return entries; }

std::vector<std::string> vocab_entries_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("vocabulary must be a JSON array of strings");
  return j.get<std::vector<std::string>>();
}

}  // namespace ucca
