// ucca: conversion, training, parsing and evaluation from the command line.
// Reports go to stdout as JSON; failures print {"error": {...}} on stderr.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ucca/checkpoint.hpp"
#include "ucca/conversion.hpp"
#include "ucca/evaluation.hpp"
#include "ucca/features.hpp"
#include "ucca/io.hpp"
#include "ucca/kernels.hpp"
#include "ucca/stats.hpp"
#include "ucca/synthetic.hpp"
#include "ucca/trainer.hpp"

using nlohmann::json;
using namespace ucca;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kBadInput = 3, kNumeric = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void print_report(const json& report) { std::cout << report.dump(2) << '\n'; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<std::vector<nn::Vec>> features_for(const std::string& path, std::size_t sentences) {
  if (path.empty()) return {};
  auto ext = read_external_features(path);
  if (ext.size() != sentences) {
    throw FormatError("'" + path + "' has " + std::to_string(ext.size()) + " lines for " + std::to_string(sentences) +
                      " sentences");
  }
  return ext;
}

int run_convert(const std::string& in, const std::string& out, const std::string& format) {
  auto corpus = read_graph_corpus(in);
  std::vector<ConstituentTree> trees;
  long dropped = 0, moves = 0, lossy = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto problems = validate(corpus[i]);
    if (!problems.empty()) throw FormatError("sentence " + std::to_string(i + 1) + ": " + problems.front());
    ConversionResult r = graph_to_tree(corpus[i]);
    dropped += static_cast<long>(r.dropped_remote_edges.size());
    moves += static_cast<long>(r.moves.size());
    lossy += r.lossy_moves;
    trees.push_back(std::move(r.tree));
  }
  TreeFormat f = format.empty() ? tree_format_for_path(out) : format == "jsonl" ? TreeFormat::kJsonl : TreeFormat::kBracketed;
  write_trees(out, trees, f);
  print_report({{"sentences", corpus.size()},
                {"remote_edges_removed", dropped},
                {"moves", moves},
                {"lossy_moves", lossy},
                {"format", f == TreeFormat::kJsonl ? "jsonl" : "bracketed"},
                {"out", out}});
  return kOk;
}

int run_restore(const std::string& in, const std::string& out, const std::string& model_path,
                const std::string& features, bool strict) {
  auto trees = read_trees(in);
  std::optional<Model> model;
  if (!model_path.empty()) model = load_checkpoint(model_path);
  auto ext = features_for(features, trees.size());
  std::vector<UccaGraph> graphs;
  long marked = 0, remotes = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    RestoreResult r;
    try {
      r = tree_to_graph(trees[i], strict ? RestoreMode::kStrict : RestoreMode::kLenient);
    } catch (const ConversionError& e) {
      throw ConversionError("tree " + std::to_string(i + 1) + ": " + e.what());
    }
    marked += static_cast<long>(r.remote_marked.size());
    UccaGraph g = model ? model->add_remotes(r, ext.empty() ? nullptr : &ext[i]) : r.graph;
    for (const Edge& e : g.edges) remotes += e.kind == EdgeKind::kRemote;
    graphs.push_back(std::move(g));
  }
  write_graph_corpus(out, graphs);
  print_report({{"sentences", graphs.size()},
                {"remote_marked_nodes", marked},
                {"remote_edges_predicted", remotes},
                {"remotes_model", model_path.empty() ? json(nullptr) : json(model_path)},
                {"out", out}});
  return kOk;
}

int run_train(const std::vector<std::string>& train_paths, const std::vector<std::string>& train_features,
              const std::string& dev_path, const std::string& dev_features, const std::string& config_path,
              const std::string& out, bool quiet) {
  if (!train_features.empty() && train_features.size() != train_paths.size()) {
    throw UsageError("give one --train-features file per --train corpus");
  }
  TrainConfig config = config_path.empty() ? TrainConfig{} : train_config_from_json(read_json_file(config_path));
  TrainData train_data;
  for (std::size_t k = 0; k < train_paths.size(); ++k) {
    auto part = read_graph_corpus(train_paths[k]);
    if (!train_features.empty()) {
      auto ext = features_for(train_features[k], part.size());
      train_data.external.insert(train_data.external.end(), ext.begin(), ext.end());
    }
    train_data.graphs.insert(train_data.graphs.end(), part.begin(), part.end());
  }
  TrainData dev_data{read_graph_corpus(dev_path), {}};
  dev_data.external = features_for(dev_features, dev_data.graphs.size());

  auto result = train(train_data, dev_data, config, [&](const EpochRecord& r) {
    if (quiet) return;
    json line{{"epoch", r.epoch},
              {"loss", r.mean_loss},
              {"loss_topdown", r.mean_topdown},
              {"loss_remote", r.mean_remote},
              {"dev_averaged_f1", r.dev.averaged.f1},
              {"dev_primary_f1", r.dev.primary.f1},
              {"dev_remote_f1", r.dev.remote.f1},
              {"improved", r.improved}};
    std::cerr << line.dump() << '\n';
  });
  json metadata{{"training", train_config_to_json(config)},
                {"best_epoch", result.best_epoch},
                {"epochs_run", result.epochs.size()},
                {"stop_reason", result.stop_reason},
                {"dev", report_to_json(result.best_dev)}};
  save_checkpoint(out, result.model, metadata);
  metadata["train_sentences"] = train_data.graphs.size();
  metadata["dev_sentences"] = dev_data.graphs.size();
  metadata["kernels"] = kernels::active().name;
  metadata["out"] = out;
  print_report(metadata);
  return kOk;
}

int run_parse(const std::string& model_path, const std::string& in, const std::string& out,
              const std::string& features, int threads) {
  Model model = load_checkpoint(model_path);
  auto sentences = read_sentences(in);
  auto ext = features_for(features, sentences.size());
  std::vector<UccaGraph> graphs(sentences.size());
  std::vector<std::string> errors(sentences.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < sentences.size();) {
      try {
        graphs[i] = model.parse(sentences[i], ext.empty() ? nullptr : &ext[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(sentences.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw std::runtime_error("sentence " + std::to_string(i + 1) + ": " + errors[i]);
  }
  write_graph_corpus(out, graphs);
  print_report({{"sentences", graphs.size()}, {"threads", count}, {"out", out}});
  return kOk;
}

int run_eval(const std::string& gold, const std::string& pred, bool tsv) {
  F1Report report = score_corpus(read_graph_corpus(gold), read_graph_corpus(pred));
  if (tsv) {
    std::cout << report_tsv_header() << '\n' << report_to_tsv(report) << '\n';
  } else {
    print_report(report_to_json(report));
  }
  return kOk;
}

int run_stats(const std::vector<std::string>& inputs) {
  std::vector<UccaGraph> corpus;
  for (const auto& path : inputs) {
    auto part = read_graph_corpus(path);
    corpus.insert(corpus.end(), part.begin(), part.end());
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto problems = validate(corpus[i]);
    if (!problems.empty()) throw FormatError("sentence " + std::to_string(i + 1) + ": " + problems.front());
  }
  print_report(stats_to_json(discontinuity_stats(corpus)));
  return kOk;
}

int run_gen(const std::string& spec_path, std::uint64_t seed, const std::string& out) {
  SyntheticSpec spec = spec_path.empty() ? SyntheticSpec{} : spec_from_json(read_json_file(spec_path));
  auto corpus = generate(spec, seed);
  write_graph_corpus(out, corpus);
  long remotes = 0;
  for (const auto& g : corpus) {
    for (const Edge& e : g.edges) remotes += e.kind == EdgeKind::kRemote;
  }
  print_report({{"sentences", corpus.size()}, {"remote_edges", remotes}, {"seed", seed}, {"out", out}});
  return kOk;
}

int fail(int code, const char* type, const std::string& message) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UCCA graph parsing toolkit"};
  app.require_subcommand(1);
  std::string kernel_choice = "auto";
  app.add_option("--kernels", kernel_choice, "Numeric kernels: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  std::string in, out, model_path, features, config_path, dev_path, dev_features, gold, pred, spec_path, format;
  std::vector<std::string> train_paths, train_features, stats_inputs;
  bool strict = false, tsv = false, quiet = false;
  int threads = 1;
  std::uint64_t seed = 0;

  auto* convert = app.add_subcommand("convert", "UCCA graphs (JSONL) to constituent trees");
  convert->add_option("--in", in, "Graph corpus")->required();
  convert->add_option("--out", out, "Tree file; .jsonl keeps token features")->required();
  convert->add_option("--format", format, "bracketed or jsonl (default: from --out)")
      ->check(CLI::IsMember({"bracketed", "jsonl"}));

  auto* restore = app.add_subcommand("restore", "Constituent trees back to UCCA graphs");
  restore->add_option("--in", in, "Tree file (bracketed or JSONL lines)")->required();
  restore->add_option("--out", out, "Graph corpus")->required();
  restore->add_option("--remotes-model", model_path, "Checkpoint whose remote classifier adds remote edges");
  restore->add_option("--features", features, "External features aligned with the trees");
  restore->add_flag("--strict", strict, "Reject markings that cannot be restored");

  auto* train_cmd = app.add_subcommand("train", "Jointly train the parser and remote classifier");
  train_cmd->add_option("--train", train_paths, "Training corpus; repeat to merge corpora")->required();
  train_cmd->add_option("--train-features", train_features, "External features, one file per --train");
  train_cmd->add_option("--dev", dev_path, "Dev corpus for model selection")->required();
  train_cmd->add_option("--dev-features", dev_features, "External features for the dev corpus");
  train_cmd->add_option("--config", config_path, "Training config JSON");
  train_cmd->add_option("--out", out, "Checkpoint to write")->required();
  train_cmd->add_flag("--quiet", quiet, "No per-epoch lines on stderr");

  auto* parse = app.add_subcommand("parse", "Parse tokenized sentences into UCCA graphs");
  parse->add_option("--model", model_path, "Checkpoint")->required();
  parse->add_option("--in", in, "Sentences: {\"tokens\": [...], \"lang\": ...} per line")->required();
  parse->add_option("--out", out, "Graph corpus")->required();
  parse->add_option("--features", features, "External features aligned with the sentences");
  parse->add_option("--threads", threads, "Sentences parsed concurrently; output order is kept")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Labeled primary/remote/averaged F1");
  eval->add_option("--gold", gold, "Gold graph corpus")->required();
  eval->add_option("--pred", pred, "Predicted graph corpus")->required();
  eval->add_flag("--tsv", tsv, "Header and one tab-separated row instead of JSON");

  auto* stats = app.add_subcommand("stats", "Distribution of discontinuity moves");
  stats->add_option("--in", stats_inputs, "Graph corpus; repeat to pool")->required();

  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen->add_option("--spec", spec_path, "Generator spec JSON (omit for defaults)");
  gen->add_option("--seed", seed, "Random seed")->required();
  gen->add_option("--out", out, "Graph corpus")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "UsageError", e.what());
  }

  try {
    if (!kernels::select(kernel_choice)) throw UsageError("kernels '" + kernel_choice + "' are not available here");
    if (*convert) return run_convert(in, out, format);
    if (*restore) return run_restore(in, out, model_path, features, strict);
    if (*train_cmd) return run_train(train_paths, train_features, dev_path, dev_features, config_path, out, quiet);
    if (*parse) return run_parse(model_path, in, out, features, threads);
    if (*eval) return run_eval(gold, pred, tsv);
    if (*stats) return run_stats(stats_inputs);
    if (*gen) return run_gen(spec_path, seed, out);
  } catch (const UsageError& e) {
    return fail(kUsage, "UsageError", e.what());
  } catch (const FormatError& e) {
    return fail(kBadInput, "FormatError", e.what());
  } catch (const GraphError& e) {
    return fail(kBadInput, "GraphError", e.what());
  } catch (const ConversionError& e) {
    return fail(kBadInput, "ConversionError", e.what());
  } catch (const SpecError& e) {
    return fail(kBadInput, "SpecError", e.what());
  } catch (const CheckpointError& e) {
    return fail(kBadInput, "CheckpointError", e.what());
  } catch (const EvaluationError& e) {
    return fail(kBadInput, "EvaluationError", e.what());
  } catch (const TrainError& e) {
    return fail(kBadInput, "TrainError", e.what());
  } catch (const nn::NumericError& e) {
    return fail(kNumeric, "NumericError", e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, "Error", e.what());
  }
  return kFailure;
}
