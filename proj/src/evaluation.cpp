#include "ucca/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include "ucca/labels.hpp"

namespace ucca {

void KindScore::finalize() {
  if (gold == 0 && predicted == 0) {
    precision = recall = f1 = 1.0;
    return;
  }
  precision = predicted > 0 ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
  recall = gold > 0 ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
  f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

void F1Report::add_counts(const F1Report& other) {
  for (auto [mine, theirs] : {std::pair{&primary, &other.primary}, std::pair{&remote, &other.remote}}) {
    mine->matched += theirs->matched;
    mine->gold += theirs->gold;
    mine->predicted += theirs->predicted;
  }
}

void F1Report::finalize() {
  averaged.matched = primary.matched + remote.matched;
  averaged.gold = primary.gold + remote.gold;
  averaged.predicted = primary.predicted + remote.predicted;
  primary.finalize();
  remote.finalize();
  averaged.finalize();
}

std::vector<EdgeRecord> edge_records(const UccaGraph& graph) {
  PrimaryIndex index(graph);
  std::vector<EdgeRecord> out;
  for (const Edge& e : graph.edges) {
    if (graph.is_terminal(e.child)) continue;
    out.push_back(EdgeRecord{index.yield(e.child), strip_label_suffixes(e.label), e.kind});
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void count_kind(const std::vector<EdgeRecord>& gold, const std::vector<EdgeRecord>& pred, EdgeKind kind, KindScore& s) {
  std::vector<EdgeRecord> g, p;
  std::copy_if(gold.begin(), gold.end(), std::back_inserter(g), [&](const EdgeRecord& r) { return r.kind == kind; });
  std::copy_if(pred.begin(), pred.end(), std::back_inserter(p), [&](const EdgeRecord& r) { return r.kind == kind; });
  std::vector<EdgeRecord> common;
  std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(common));
  s.matched = static_cast<long>(common.size());
  s.gold = static_cast<long>(g.size());
  s.predicted = static_cast<long>(p.size());
}

F1Report counts(const UccaGraph& gold, const UccaGraph& pred) {
  if (gold.tokens.size() != pred.tokens.size()) {
    throw EvaluationError("token mismatch: gold has " + std::to_string(gold.tokens.size()) + " tokens, prediction " +
                          std::to_string(pred.tokens.size()));
  }
  for (std::size_t i = 0; i < gold.tokens.size(); ++i) {
    if (gold.tokens[i].form != pred.tokens[i].form) {
      throw EvaluationError("token mismatch at position " + std::to_string(i + 1) + ": '" + gold.tokens[i].form +
                            "' vs '" + pred.tokens[i].form + "'");
    }
  }
  auto g = edge_records(gold);
  auto p = edge_records(pred);
  F1Report r;
  count_kind(g, p, EdgeKind::kPrimary, r.primary);
  count_kind(g, p, EdgeKind::kRemote, r.remote);
  return r;
}

}  // namespace

F1Report score(const UccaGraph& gold, const UccaGraph& pred) {
  F1Report r = counts(gold, pred);
  r.finalize();
  return r;
}

F1Report score_corpus(const std::vector<UccaGraph>& gold, const std::vector<UccaGraph>& pred) {
  if (gold.size() != pred.size()) {
    throw EvaluationError("corpus size mismatch: " + std::to_string(gold.size()) + " gold vs " +
                          std::to_string(pred.size()) + " predicted");
  }
  F1Report total;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    try {
      total.add_counts(counts(gold[i], pred[i]));
    } catch (const EvaluationError& e) {
      throw EvaluationError("sentence " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  total.finalize();
  return total;
}

nlohmann::json report_to_json(const F1Report& report) {
  auto kind = [](const KindScore& s) {
    return nlohmann::json{{"p", s.precision},      {"r", s.recall}, {"f1", s.f1},
                          {"matched", s.matched}, {"gold", s.gold}, {"predicted", s.predicted}};
  };
  return {{"primary", kind(report.primary)}, {"remote", kind(report.remote)}, {"averaged", kind(report.averaged)}};
}

std::string report_tsv_header() {
  return "primary_p\tprimary_r\tprimary_f1\tremote_p\tremote_r\tremote_f1\tavg_p\tavg_r\tavg_f1";
}

std::string report_to_tsv(const F1Report& report) {
  std::string out;
  char buf[32];
  for (const KindScore* s : {&report.primary, &report.remote, &report.averaged}) {
    for (double v : {s->precision, s->recall, s->f1}) {
      std::snprintf(buf, sizeof buf, "%.4f", v);
      if (!out.empty()) out += '\t';
      out += buf;
    }
  }
  return out;
}

}  // namespace ucca
