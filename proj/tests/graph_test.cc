#include "gtest/gtest.h"

#include "fixtures.hpp"
#include "ucca/graph.hpp"
#include "ucca/io.hpp"

using namespace ucca;
using ucca::fixtures::fig;
using ucca::fixtures::GraphBuilder;

TEST(ValidateTest, FigureOneIsValid) { EXPECT_TRUE(validate(fixtures::figure1()).empty()); }

TEST(ValidateTest, MinimalGraph) {
  auto g = GraphBuilder(1).edge(100, 1).build();
  EXPECT_TRUE(validate(g).empty());
}

TEST(ValidateTest, RemoteEdgeOntoTerminal) {
  auto g = GraphBuilder(2).node(101).node(102).edge(100, 101, "A").edge(100, 102, "P").edge(101, 1).edge(102, 2)
               .remote(101, 2, "A")
               .build();
  auto problems = validate(g);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("terminal 2"), std::string::npos) << problems[0];
}

TEST(ValidateTest, TwoPrimaryParents) {
  auto g = GraphBuilder(2).node(101).edge(100, 101, "A").edge(100, 1).edge(101, 1).edge(101, 2).build();
  auto problems = validate(g);
  ASSERT_FALSE(problems.empty());
  EXPECT_NE(problems[0].find("node 1 has 2 primary parents"), std::string::npos) << problems[0];
}

TEST(ValidateTest, RemoteCycle) {
  auto g = GraphBuilder(2).node(101).node(102).edge(100, 101, "A").edge(101, 102, "B").edge(101, 1).edge(102, 2)
               .remote(102, 101, "C")
               .build();
  auto problems = validate(g);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("cycle"), std::string::npos);
}

TEST(ValidateTest, RemoteDuplicatingPrimary) {
  auto g = GraphBuilder(1).node(101).edge(100, 101, "A").edge(101, 1).remote(100, 101, "A").build();
  auto problems = validate(g);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("duplicates a primary"), std::string::npos);
}

TEST(ValidateTest, ReservedLabels) {
  EXPECT_FALSE(validate(GraphBuilder(1).node(101).edge(100, 101, "ROOT").edge(101, 1).build()).empty());
  EXPECT_FALSE(validate(GraphBuilder(1).node(101).edge(100, 101, "A+B").edge(101, 1).build()).empty());
  EXPECT_FALSE(validate(GraphBuilder(1).node(101).edge(100, 101, "A-remote").edge(101, 1).build()).empty());
}

TEST(ValidateTest, ChildlessNonterminal) {
  auto g = GraphBuilder(1).node(101).edge(100, 1).edge(100, 101, "A").build();
  auto problems = validate(g);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("no primary children"), std::string::npos);
}

TEST(YieldTest, FigureOne) {
  auto g = fixtures::figure1();
  // ``, tastete and . are tokens 1, 6 and 7 of the seven-token sentence.
  EXPECT_EQ(yield_of(g, fig(3)), (std::vector<int>{1, 6, 7}));
  EXPECT_EQ(yield_of(g, fig(2)), (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(yield_of(g, make_node_id(4)), (std::vector<int>{4}));
  EXPECT_EQ(yield_of(g, fig(1)), (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
  EXPECT_THROW(yield_of(g, make_node_id(55)), GraphError);
}

TEST(DiscontinuityTest, FigureOne) {
  auto g = fixtures::figure1();
  EXPECT_TRUE(is_discontinuous(g, fig(3)));
  EXPECT_FALSE(is_discontinuous(g, fig(6)));
  EXPECT_FALSE(is_discontinuous(g, fig(5)));
  EXPECT_FALSE(is_discontinuous(g, fig(1)));
  EXPECT_THROW(is_discontinuous(g, make_node_id(2)), GraphError);
}

TEST(LcaTest, FigureOne) {
  auto g = fixtures::figure1();
  EXPECT_EQ(lca(g, fig(3), make_node_id(2)), fig(1));
  EXPECT_EQ(lca(g, make_node_id(2), fig(3)), fig(1));
  EXPECT_EQ(lca(g, fig(6), fig(6)), fig(6));
  EXPECT_EQ(lca(g, fig(1), make_node_id(5)), fig(1));
  EXPECT_EQ(lca(g, make_node_id(3), make_node_id(4)), fig(6));
  EXPECT_EQ(lca(g, fig(5), fig(6)), fig(2));
}

TEST(CanonicalTest, IdsFollowPreorder) {
  auto g = canonicalize(fixtures::figure1());
  EXPECT_TRUE(validate(g).empty());
  EXPECT_EQ(g.root, make_node_id(8));
  // Root children by leftmost terminal: node 3 (token 1), node 2 (token 2), node 7 (token 5).
  EXPECT_EQ(g.edges[0], (Edge{make_node_id(8), make_node_id(9), "H", EdgeKind::kPrimary}));
  EXPECT_EQ(canonical_edges(g), canonical_edges(fixtures::figure1()));
}

TEST(SerializationTest, GraphRoundTrip) {
  auto g = fixtures::figure1();
  auto back = graph_from_json(nlohmann::json::parse(graph_to_json(g).dump()));
  EXPECT_EQ(back, g);
}

TEST(SerializationTest, BracketedTreeRoundTrip) {
  auto tree = tree_from_sexpr(fixtures::kFigure2);
  EXPECT_TRUE(validate(tree).empty());
  EXPECT_EQ(tree.num_tokens(), 7);
  EXPECT_EQ(tree_to_sexpr(tree), fixtures::kFigure2);
}

TEST(SerializationTest, TokenEscaping) {
  ConstituentTree tree;
  tree.tokens = {Token{"a (b)", "", "", "", ""}, Token{"c\\d", "", "", "", ""}};
  tree.nodes = {TreeNode{"ROOT", 0, {1}}, TreeNode{"H", 0, {2, 3}}, TreeNode{"", 1, {}}, TreeNode{"", 2, {}}};
  std::string text = tree_to_sexpr(tree);
  EXPECT_EQ(text, "(ROOT (H a\\s\\(b\\) c\\\\d))");
  EXPECT_EQ(tree_from_sexpr(text).tokens[0].form, "a (b)");
  EXPECT_EQ(tree_from_sexpr(text).tokens[1].form, "c\\d");
}

TEST(SerializationTest, JsonTreeKeepsFeatures) {
  auto g = fixtures::figure1();
  ConstituentTree tree = tree_from_sexpr(fixtures::kFigure2);
  tree.tokens = g.tokens;
  tree.lang = "de";
  auto back = tree_from_json(nlohmann::json::parse(tree_to_json(tree).dump()));
  EXPECT_EQ(back, tree);
}

TEST(SerializationTest, MalformedInput) {
  EXPECT_THROW(tree_from_sexpr("(ROOT (H a)"), FormatError);
  EXPECT_THROW(tree_from_sexpr("(ROOT)"), FormatError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"tokens":[]})")), FormatError);
}

TEST(TreeValidateTest, LeafOrder) {
  ConstituentTree tree;
  tree.tokens = {Token{"a", "", "", "", ""}, Token{"b", "", "", "", ""}};
  tree.nodes = {TreeNode{"ROOT", 0, {1, 2}}, TreeNode{"", 2, {}}, TreeNode{"", 1, {}}};
  EXPECT_FALSE(validate(tree).empty());
  std::swap(tree.nodes[1].token, tree.nodes[2].token);
  EXPECT_TRUE(validate(tree).empty());
  tree.nodes[0].label = "S";
  EXPECT_FALSE(validate(tree).empty());
}
