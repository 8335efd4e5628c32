#pragma once

// Corpus and tree serialization: JSONL graphs, bracketed trees, JSONL trees.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ucca/graph.hpp"

namespace ucca {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tokens plus language tag; the input unit of the parser.
struct Sentence {
  std::vector<Token> tokens;
  std::string lang;
};

nlohmann::json token_to_json(const Token& token);
Token token_from_json(const nlohmann::json& j, const std::string& lang);

nlohmann::json graph_to_json(const UccaGraph& graph);
UccaGraph graph_from_json(const nlohmann::json& j);

Sentence sentence_from_json(const nlohmann::json& j);
Sentence sentence_of(const UccaGraph& graph);

std::vector<UccaGraph> read_graph_corpus(const std::string& path);
void write_graph_corpus(const std::string& path, const std::vector<UccaGraph>& graphs);
std::vector<Sentence> read_sentences(const std::string& path);

// Bracketed form, e.g. (ROOT (H (U ``) (P tastete))). Leaves are token forms
// with '(' ')' '\' and whitespace backslash-escaped.
std::string tree_to_sexpr(const ConstituentTree& tree);
// Tokens carry forms only.
ConstituentTree tree_from_sexpr(std::string_view text);

std::string escape_token(std::string_view form);
std::string unescape_token(std::string_view escaped);

// {"tokens":[...], "lang":..., "tree":"(ROOT ...)"}; keeps token features.
nlohmann::json tree_to_json(const ConstituentTree& tree);
ConstituentTree tree_from_json(const nlohmann::json& j);

enum class TreeFormat { kBracketed, kJsonl };

// One tree per line; each line is detected independently ('{' means JSON).
std::vector<ConstituentTree> read_trees(const std::string& path);
void write_trees(const std::string& path, const std::vector<ConstituentTree>& trees, TreeFormat format);
TreeFormat tree_format_for_path(const std::string& path);

std::vector<std::string> read_lines(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace ucca
