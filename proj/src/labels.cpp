#include "ucca/labels.hpp"

#include <cctype>

#include "ucca/graph.hpp"

namespace ucca {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

LabelElement parse_label_element(std::string_view element) {
  LabelElement out;
  if (ends_with(element, kAncestorSuffix)) {
    out.ancestor1 = true;
    element.remove_suffix(kAncestorSuffix.size());
  }
  if (ends_with(element, kRemoteSuffix)) {
    out.remote = true;
    element.remove_suffix(kRemoteSuffix.size());
  }
  out.base = std::string(element);
  return out;
}

std::string format_label_element(const LabelElement& element) {
  std::string out = element.base;
  if (element.remote) out += kRemoteSuffix;
  if (element.ancestor1) out += kAncestorSuffix;
  return out;
}

std::vector<std::string> split_label_chain(std::string_view label) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = label.find(kChainSeparator, start);
    out.emplace_back(label.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_label_chain(const std::vector<std::string>& elements) {
  std::string out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i) out += kChainSeparator;
    out += elements[i];
  }
  return out;
}

std::string strip_label_suffixes(std::string_view element) { return parse_label_element(element).base; }

std::optional<std::string> category_label_problem(std::string_view label) {
  if (label.empty()) return "empty category label";
  if (label == kRootLabel) return "category label ROOT is reserved";
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '\\' || c == kChainSeparator) {
      return "category label '" + std::string(label) + "' contains a reserved character";
    }
  }
  if (ends_with(label, kRemoteSuffix) || ends_with(label, kAncestorSuffix)) {
    return "category label '" + std::string(label) + "' ends with a reserved suffix";
  }
  return std::nullopt;
}

bool matches_tree_label_grammar(std::string_view label) {
  auto elements = split_label_chain(label);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i == 0 && elements[i] == kRootLabel) continue;
    LabelElement e = parse_label_element(elements[i]);
    if (category_label_problem(e.base)) return false;
  }
  return true;
}

}  // namespace ucca
