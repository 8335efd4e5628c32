#include "ucca/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ucca {

using nlohmann::json;

namespace {

std::string get_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw FormatError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

json token_to_json(const Token& token) {
  return json{{"form", token.form}, {"pos", token.pos}, {"ner", token.ner}, {"dep", token.dep_label}};
}

Token token_from_json(const json& j, const std::string& lang) {
  Token t;
  if (j.is_string()) {
    // Bare form, no features.
    t.form = j.get<std::string>();
    t.language = lang;
    if (t.form.empty()) throw FormatError("token form must be non-empty");
    return t;
  }
  if (!j.is_object()) throw FormatError("token must be a string or an object");
  t.form = get_string(j, "form");
  t.pos = get_string(j, "pos");
  t.ner = get_string(j, "ner");
  t.dep_label = get_string(j, "dep");
  t.language = lang;
  if (t.form.empty()) throw FormatError("token form must be non-empty");
  return t;
}

json graph_to_json(const UccaGraph& graph) {
  json tokens = json::array();
  for (const Token& t : graph.tokens) tokens.push_back(token_to_json(t));
  json nodes = json::array();
  for (NodeId id : graph.nonterminals) nodes.push_back(to_int(id));
  json edges = json::array();
  for (const Edge& e : graph.edges) {
    edges.push_back(json{{"parent", to_int(e.parent)},
                         {"child", to_int(e.child)},
                         {"label", e.label},
                         {"remote", e.kind == EdgeKind::kRemote}});
  }
  return json{{"tokens", tokens}, {"lang", graph.lang}, {"nodes", nodes}, {"root", to_int(graph.root)}, {"edges", edges}};
}

UccaGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("graph must be a JSON object");
  UccaGraph g;
  g.lang = get_string(j, "lang");
  if (!j.contains("tokens") || !j["tokens"].is_array()) throw FormatError("graph needs a 'tokens' array");
  for (const json& t : j["tokens"]) g.tokens.push_back(token_from_json(t, g.lang));
  const int n = g.num_tokens();
  if (!j.contains("root") || !j["root"].is_number_integer()) throw FormatError("graph needs an integer 'root'");
  g.root = make_node_id(j["root"].get<int>());
  if (j.contains("nodes")) {
    for (const json& id : j["nodes"]) {
      if (!id.is_number_integer()) throw FormatError("node ids must be integers");
      int v = id.get<int>();
      if (v > n) g.nonterminals.push_back(make_node_id(v));
    }
  }
  if (!j.contains("edges") || !j["edges"].is_array()) throw FormatError("graph needs an 'edges' array");
  for (const json& e : j["edges"]) {
    if (!e.is_object() || !e.contains("parent") || !e.contains("child")) throw FormatError("edge needs parent and child");
    Edge edge;
    edge.parent = make_node_id(e["parent"].get<int>());
    edge.child = make_node_id(e["child"].get<int>());
    edge.label = get_string(e, "label");
    edge.kind = e.value("remote", false) ? EdgeKind::kRemote : EdgeKind::kPrimary;
    g.edges.push_back(std::move(edge));
  }
  return g;
}

Sentence sentence_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tokens") || !j["tokens"].is_array()) {
    throw FormatError("sentence needs a 'tokens' array");
  }
  Sentence s;
  s.lang = get_string(j, "lang");
  for (const json& t : j["tokens"]) s.tokens.push_back(token_from_json(t, s.lang));
  if (s.tokens.empty()) throw FormatError("sentence has no tokens");
  return s;
}

Sentence sentence_of(const UccaGraph& graph) { return Sentence{graph.tokens, graph.lang}; }

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (!blank) lines.push_back(line);
  }
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
  if (!out) throw FormatError("write failed for '" + path + "'");
}

namespace {

template <typename F>
auto parse_jsonl(const std::string& path, F&& convert) {
  std::vector<decltype(convert(json()))> out;
  int lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    try {
      out.push_back(convert(json::parse(line)));
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<UccaGraph> read_graph_corpus(const std::string& path) {
  return parse_jsonl(path, [](const json& j) { return graph_from_json(j); });
}

void write_graph_corpus(const std::string& path, const std::vector<UccaGraph>& graphs) {
  std::string text;
  for (const UccaGraph& g : graphs) text += graph_to_json(g).dump() + "\n";
  write_text(path, text);
}

std::vector<Sentence> read_sentences(const std::string& path) {
  return parse_jsonl(path, [](const json& j) { return sentence_from_json(j); });
}

// ---------------------------------------------------------------------------
// Bracketed trees.

std::string escape_token(std::string_view form) {
  std::string out;
  for (char c : form) {
    switch (c) {
      case '(': out += "\\("; break;
      case ')': out += "\\)"; break;
      case '\\': out += "\\\\"; break;
      case ' ': out += "\\s"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_token(std::string_view escaped) {
  std::string out;
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++i >= escaped.size()) throw FormatError("dangling escape in token");
    switch (escaped[i]) {
      case 's': out += ' '; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: out += escaped[i];
    }
  }
  return out;
}

std::string tree_to_sexpr(const ConstituentTree& tree) {
  std::string out;
  auto walk = [&](auto&& self, int v) -> void {
    const TreeNode& node = tree.nodes[v];
    if (node.is_leaf()) {
      out += escape_token(tree.tokens.at(node.token - 1).form);
      return;
    }
    out += '(';
    out += node.label;
    for (int k : node.children) {
      out += ' ';
      self(self, k);
    }
    out += ')';
  };
  if (!tree.nodes.empty()) walk(walk, 0);
  return out;
}

namespace {

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  ConstituentTree read() {
    skip_space();
    int root = read_node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after tree");
    if (root != 0) fail("internal error: root index");
    return std::move(tree_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("bracketed tree, offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos_;
    }
    if (pos_ > text_.size()) fail("dangling escape");
    if (pos_ == start) fail("expected an atom");
    return std::string(text_.substr(start, pos_ - start));
  }

  int read_node() {
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    ++pos_;
    skip_space();
    int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{read_atom(), 0, {}});
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated node");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      int child;
      if (text_[pos_] == '(') {
        child = read_node();
      } else {
        Token token;
        token.form = unescape_token(read_atom());
        tree_.tokens.push_back(std::move(token));
        child = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{"", static_cast<int>(tree_.tokens.size()), {}});
      }
      tree_.nodes[index].children.push_back(child);
    }
    if (tree_.nodes[index].children.empty()) fail("node '" + tree_.nodes[index].label + "' has no children");
    return index;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  ConstituentTree tree_;
};

}  // namespace

ConstituentTree tree_from_sexpr(std::string_view text) { return SexprReader(text).read(); }

json tree_to_json(const ConstituentTree& tree) {
  json tokens = json::array();
  for (const Token& t : tree.tokens) tokens.push_back(token_to_json(t));
  return json{{"tokens", tokens}, {"lang", tree.lang}, {"tree", tree_to_sexpr(tree)}};
}

ConstituentTree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tree")) throw FormatError("tree record needs a 'tree' field");
  ConstituentTree tree = tree_from_sexpr(j["tree"].get<std::string>());
  tree.lang = get_string(j, "lang");
  if (j.contains("tokens")) {
    Sentence s = sentence_from_json(j);
    if (s.tokens.size() != tree.tokens.size()) throw FormatError("token count differs from tree leaves");
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (s.tokens[i].form != tree.tokens[i].form) {
        throw FormatError("token " + std::to_string(i + 1) + " form differs from tree leaf");
      }
    }
    tree.tokens = std::move(s.tokens);
  } else {
    for (Token& t : tree.tokens) t.language = tree.lang;
  }
  return tree;
}

std::vector<ConstituentTree> read_trees(const std::string& path) {
  std::vector<ConstituentTree> out;
  int lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t");
    try {
      if (line[first] == '{') {
        out.push_back(tree_from_json(json::parse(line)));
      } else {
        out.push_back(tree_from_sexpr(line));
      }
    } catch (const std::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_trees(const std::string& path, const std::vector<ConstituentTree>& trees, TreeFormat format) {
  std::string text;
  for (const ConstituentTree& t : trees) {
    text += format == TreeFormat::kJsonl ? tree_to_json(t).dump() : tree_to_sexpr(t);
    text += '\n';
  }
  write_text(path, text);
}

TreeFormat tree_format_for_path(const std::string& path) {
  auto ends = [&](std::string_view s) {
    return path.size() >= s.size() && std::string_view(path).substr(path.size() - s.size()) == s;
  };
  return ends(".jsonl") || ends(".json") ? TreeFormat::kJsonl : TreeFormat::kBracketed;
}

}  // namespace ucca
