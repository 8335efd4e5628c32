#include "gtest/gtest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ucca/evaluation.hpp"
#include "ucca/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;

  json report() const { return json::parse(out); }
  json error() const { return json::parse(err).at("error"); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ucca_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!HasFailure()) fs::remove_all(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  Outcome ucca(const std::string& args) const {
    std::string cmd = std::string(UCCA_BIN) + " " + args + " >" + path("stdout") + " 2>" + path("stderr");
    int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(path("stdout"));
    r.err = slurp(path("stderr"));
    return r;
  }

  // Small discontinuous corpus with remotes.
  void make_corpus(const std::string& name, int seed) const {
    write("spec.json", R"({"sentences": 10, "min_tokens": 3, "max_tokens": 8, "p_remote": 0.4,
                          "p_discont": 0.6, "remote_unique_spans": true})");
    Outcome r = ucca("gen --spec " + path("spec.json") + " --seed " + std::to_string(seed) + " --out " + path(name));
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, ConvertRestoreEvalStats) {
  make_corpus("gold.jsonl", 5);
  for (const char* tree_file : {"trees.txt", "trees.jsonl"}) {
    Outcome conv = ucca("convert --in " + path("gold.jsonl") + " --out " + path(tree_file));
    ASSERT_EQ(conv.code, 0) << conv.err;
    EXPECT_EQ(conv.report().at("sentences"), 10);
    EXPECT_EQ(conv.report().at("lossy_moves"), 0);
    EXPECT_GT(conv.report().at("remote_edges_removed").get<int>(), 0);

    Outcome rest = ucca("restore --strict --in " + path(tree_file) + " --out " + path("restored.jsonl"));
    ASSERT_EQ(rest.code, 0) << rest.err;

    // Ancestor-1 moves are undone exactly; only remote edges are lost.
    Outcome ev = ucca("eval --gold " + path("gold.jsonl") + " --pred " + path("restored.jsonl"));
    ASSERT_EQ(ev.code, 0) << ev.err;
    EXPECT_EQ(ev.report().at("primary").at("f1"), 1.0);
    EXPECT_EQ(ev.report().at("remote").at("predicted"), 0);
  }
  EXPECT_EQ(slurp(path("trees.txt")).front(), '(');

  Outcome st = ucca("stats --in " + path("gold.jsonl"));
  ASSERT_EQ(st.code, 0) << st.err;
  EXPECT_EQ(st.report().at("graphs"), 10);
  EXPECT_EQ(st.report().at("categories").at(0).at("category"), "ancestor 1");
  EXPECT_EQ(st.report().at("categories").at(0).at("percent"), 100.0);

  Outcome tsv = ucca("eval --tsv --gold " + path("gold.jsonl") + " --pred " + path("gold.jsonl"));
  ASSERT_EQ(tsv.code, 0);
  EXPECT_EQ(tsv.out.substr(0, tsv.out.find('\n')), ucca::report_tsv_header());
}

TEST_F(CliTest, GenIsSeeded) {
  make_corpus("a.jsonl", 9);
  make_corpus("b.jsonl", 9);
  make_corpus("c.jsonl", 10);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
}

TEST_F(CliTest, TrainParseRestore) {
  make_corpus("train1.jsonl", 1);
  make_corpus("train2.jsonl", 2);
  make_corpus("dev.jsonl", 3);
  write("cfg.json", R"({"max_epochs": 3, "seed": 4, "learning_rate": 0.002,
                        "network": {"word_dim": 8, "pos_dim": 4, "ner_dim": 4, "dep_dim": 4,
                                    "lstm_dim": 8, "mlp_dim": 8, "remote_dim": 8}})");
  Outcome tr = ucca("train --train " + path("train1.jsonl") + " --train " + path("train2.jsonl") + " --dev " +
                path("dev.jsonl") + " --config " + path("cfg.json") + " --out " + path("model.json"));
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_EQ(tr.report().at("train_sentences"), 20);
  EXPECT_EQ(tr.report().at("epochs_run"), 3);
  // One JSON line per epoch on stderr.
  std::istringstream lines(tr.err);
  int epochs = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_EQ(json::parse(line).at("epoch"), ++epochs);
  }
  EXPECT_EQ(epochs, 3);
  EXPECT_EQ(json::parse(slurp(path("model.json"))).at("version"), 1);

  // Parsing takes plain token lists; threads do not change the output.
  std::ofstream sentences(path("tokens.jsonl"));
  for (const auto& g : ucca::read_graph_corpus(path("dev.jsonl"))) {
    json tokens = json::array();
    for (const auto& t : g.tokens) tokens.push_back(t.form);
    sentences << json{{"tokens", tokens}}.dump() << '\n';
  }
  sentences.close();
  Outcome p1 = ucca("parse --model " + path("model.json") + " --in " + path("tokens.jsonl") + " --out " + path("p1.jsonl"));
  ASSERT_EQ(p1.code, 0) << p1.err;
  Outcome p3 = ucca("parse --threads 3 --model " + path("model.json") + " --in " + path("tokens.jsonl") + " --out " +
                path("p3.jsonl"));
  ASSERT_EQ(p3.code, 0) << p3.err;
  EXPECT_EQ(slurp(path("p1.jsonl")), slurp(path("p3.jsonl")));
  auto parsed = ucca::read_graph_corpus(path("p1.jsonl"));
  ASSERT_EQ(parsed.size(), 10u);
  for (const auto& g : parsed) EXPECT_TRUE(ucca::validate(g).empty());

  Outcome ev = ucca("eval --gold " + path("dev.jsonl") + " --pred " + path("p1.jsonl"));
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_GE(ev.report().at("averaged").at("f1").get<double>(), 0.0);

  ASSERT_EQ(ucca("convert --in " + path("dev.jsonl") + " --out " + path("dev.trees.jsonl")).code, 0);
  Outcome rest = ucca("restore --in " + path("dev.trees.jsonl") + " --remotes-model " + path("model.json") + " --out " +
                  path("r.jsonl"));
  ASSERT_EQ(rest.code, 0) << rest.err;
  for (const auto& g : ucca::read_graph_corpus(path("r.jsonl"))) EXPECT_TRUE(ucca::validate(g).empty());
}

TEST_F(CliTest, ErrorsAreJson) {
  Outcome missing = ucca("eval --gold " + path("none.jsonl") + " --pred " + path("none.jsonl"));
  EXPECT_EQ(missing.code, 3);
  EXPECT_EQ(missing.error().at("type"), "FormatError");
  EXPECT_TRUE(missing.out.empty());

  Outcome usage = ucca("parse --model x.json");
  EXPECT_EQ(usage.code, 2);
  EXPECT_EQ(usage.error().at("type"), "UsageError");

  EXPECT_EQ(ucca("").code, 2);
  EXPECT_EQ(ucca("frobnicate").code, 2);

  write("bad.jsonl", "{\"tokens\": [\n");
  Outcome bad = ucca("stats --in " + path("bad.jsonl"));
  EXPECT_EQ(bad.code, 3);
  EXPECT_EQ(bad.error().at("type"), "FormatError");

  make_corpus("c.jsonl", 1);
  write("cfg.json", R"({"epochs": 3})");
  Outcome cfg = ucca("train --train " + path("c.jsonl") + " --dev " + path("c.jsonl") + " --config " + path("cfg.json") +
                 " --out " + path("m.json"));
  EXPECT_EQ(cfg.code, 3);
  EXPECT_EQ(cfg.error().at("type"), "TrainError");
  EXPECT_FALSE(fs::exists(path("m.json")));

  write("damaged.json", R"({"version": 99})");
  Outcome ckpt = ucca("parse --model " + path("damaged.json") + " --in " + path("c.jsonl") + " --out " + path("p.jsonl"));
  EXPECT_EQ(ckpt.code, 3);
  EXPECT_EQ(ckpt.error().at("type"), "CheckpointError");

  write("spec.json", R"({"min_tokens": 9, "max_tokens": 2})");
  Outcome spec = ucca("gen --spec " + path("spec.json") + " --seed 1 --out " + path("g.jsonl"));
  EXPECT_EQ(spec.code, 3);
  EXPECT_EQ(spec.error().at("type"), "SpecError");

  EXPECT_EQ(ucca("--help").code, 0);
  EXPECT_EQ(ucca("train --help").code, 0);
}

TEST_F(CliTest, KernelChoice) {
  make_corpus("c.jsonl", 2);
  EXPECT_EQ(ucca("--kernels scalar stats --in " + path("c.jsonl")).code, 0);
  EXPECT_EQ(ucca("--kernels neon stats --in " + path("c.jsonl")).code, 2);
}

}  // namespace
