#pragma once

// Seeded random UCCA corpora. Graphs are projective trees plus two kinds of
// decoration: ancestor-1 discontinuities (a middle child of some node A is
// lifted to A's parent, which restoration undoes exactly) and remote edges.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucca/graph.hpp"

namespace ucca {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyntheticSpec {
  int sentences = 100;
  int vocab_size = 200;
  int min_tokens = 3;
  int max_tokens = 20;
  int max_depth = 5;  // nonterminal levels below the root
  int min_branching = 2;
  int max_branching = 4;
  double p_remote = 0.3;   // per non-root nonterminal
  double p_discont = 0.5;  // per sentence
  double p_unary = 0.1;    // per nonterminal, a unary chain link below it
  double p_bare = 0.3;     // single-token part attached as a bare terminal
  // Remote edges only between nodes whose yield extent no other nonterminal
  // shares. Span-based remote scoring cannot tell such nodes apart.
  bool remote_unique_spans = false;
  std::vector<std::string> labels{"H", "A", "P", "S", "D", "C", "E", "N", "R", "L", "U", "F", "G", "T", "Q"};
  std::vector<std::string> remote_labels{"A", "C", "D", "E"};
  std::vector<std::string> languages{"en"};
};

// Throws SpecError on out-of-range values or infeasible combinations.
void check_spec(const SyntheticSpec& spec);

SyntheticSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SyntheticSpec& spec);

// Pure function of (spec, seed); every graph is canonical and valid.
std::vector<UccaGraph> generate(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace ucca
