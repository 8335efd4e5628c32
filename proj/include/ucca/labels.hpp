#pragma once

// Label grammar for converted trees. A tree label is a "+"-joined chain of
// elements, outermost first; each element is BASE, optionally followed by
// "-remote" and then "-ancestor1".

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ucca {

inline constexpr std::string_view kRemoteSuffix = "-remote";
inline constexpr std::string_view kAncestorSuffix = "-ancestor1";
inline constexpr char kChainSeparator = '+';

struct LabelElement {
  std::string base;
  bool remote = false;
  bool ancestor1 = false;

  friend bool operator==(const LabelElement&, const LabelElement&) = default;
};

LabelElement parse_label_element(std::string_view element);
std::string format_label_element(const LabelElement& element);

std::vector<std::string> split_label_chain(std::string_view label);
std::string join_label_chain(const std::vector<std::string>& elements);

// Base category with conversion suffixes removed (single element).
std::string strip_label_suffixes(std::string_view element);

// Why a category label from a corpus cannot be used, if it cannot.
std::optional<std::string> category_label_problem(std::string_view label);

// Full tree-label grammar check (chain of suffixed elements, or ROOT-prefixed).
bool matches_tree_label_grammar(std::string_view label);

}  // namespace ucca
