#pragma once

// Labeled yield-based precision/recall/F1 over primary and remote edges.
// "averaged" pools the primary and remote counts (micro-average).

#include <string>
#include <vector>

#include "json.hpp"
#include "ucca/graph.hpp"

namespace ucca {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KindScore {
  long matched = 0;
  long gold = 0;
  long predicted = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Fills precision/recall/f1 from the counts; empty vs empty scores 1.
  void finalize();
  friend bool operator==(const KindScore&, const KindScore&) = default;
};

struct F1Report {
  KindScore primary;
  KindScore remote;
  KindScore averaged;

  void add_counts(const F1Report& other);
  void finalize();
  friend bool operator==(const F1Report&, const F1Report&) = default;
};

// One record per labeled edge (edges into terminals are skipped): the
// child's primary yield, the label without conversion suffixes, the kind.
// Sorted.
std::vector<EdgeRecord> edge_records(const UccaGraph& graph);

F1Report score(const UccaGraph& gold, const UccaGraph& pred);
// Counts summed over sentence pairs, then finalized.
F1Report score_corpus(const std::vector<UccaGraph>& gold, const std::vector<UccaGraph>& pred);

nlohmann::json report_to_json(const F1Report& report);
std::string report_tsv_header();
// primary p r f1, remote p r f1, averaged p r f1; tab-separated.
std::string report_to_tsv(const F1Report& report);

}  // namespace ucca
