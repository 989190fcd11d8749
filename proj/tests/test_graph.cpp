#include <catch2/catch_amalgamated.hpp>

#include "diagalign/graph.hpp"
#include "test_support.hpp"

using namespace diagalign;
using testsupport::oracle_induced_reachable_pairs;
using testsupport::oracle_reachable_pairs;

namespace {

DiagramGraph chain_abc() {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "a", NodeOrigin::parsed, {}});
  g.add_node({NodeId("G_2"), "b", NodeOrigin::parsed, {}});
  g.add_node({NodeId("G_3"), "c", NodeOrigin::parsed, {}});
  g.add_edge(NodeId("G_1"), NodeId("G_2"));
  g.add_edge(NodeId("G_2"), NodeId("G_3"));
  return g;
}

}  // namespace

TEST_CASE("reachable_pairs traverses intermediate nodes outside the endpoint set") {
  DiagramGraph g = chain_abc();
  NodeIdPairSet pairs = reachable_pairs(g, {NodeId("G_1"), NodeId("G_3")});
  CHECK(pairs == NodeIdPairSet{{NodeId("G_1"), NodeId("G_3")}});
}

TEST_CASE("reachable_pairs on an edgeless graph is empty") {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "a", NodeOrigin::parsed, {}});
  g.add_node({NodeId("G_2"), "b", NodeOrigin::parsed, {}});
  CHECK(reachable_pairs(g, {NodeId("G_1"), NodeId("G_2")}).empty());
}

TEST_CASE("reachable_pairs on a 3-cycle yields all 6 ordered pairs") {
  DiagramGraph g;
  for (int i = 1; i <= 3; ++i)
    g.add_node({NodeId::indexed(i), std::string(1, char('a' + i - 1)), NodeOrigin::parsed, {}});
  g.add_edge(NodeId("G_1"), NodeId("G_2"));
  g.add_edge(NodeId("G_2"), NodeId("G_3"));
  g.add_edge(NodeId("G_3"), NodeId("G_1"));
  NodeIdSet eps{NodeId("G_1"), NodeId("G_2"), NodeId("G_3")};
  NodeIdPairSet pairs = reachable_pairs(g, eps);
  CHECK(pairs.size() == 6);
  CHECK(pairs == oracle_reachable_pairs(g, eps));
}

TEST_CASE("induced_reachable_pairs discards paths through excluded nodes") {
  DiagramGraph g = chain_abc();
  CHECK(induced_reachable_pairs(g, {NodeId("G_1"), NodeId("G_3")}).empty());
}

TEST_CASE("induced_reachable_pairs keeps direct edges inside the set") {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "a", NodeOrigin::parsed, {}});
  g.add_node({NodeId("G_2"), "c", NodeOrigin::parsed, {}});
  g.add_edge(NodeId("G_1"), NodeId("G_2"));
  CHECK(induced_reachable_pairs(g, {NodeId("G_1"), NodeId("G_2")}) ==
        NodeIdPairSet{{NodeId("G_1"), NodeId("G_2")}});
}

TEST_CASE("induced closure on a triangle matches the brute-force oracle") {
  DiagramGraph g;
  for (int i = 1; i <= 3; ++i)
    g.add_node({NodeId::indexed(i), std::string(1, char('a' + i - 1)), NodeOrigin::parsed, {}});
  g.add_edge(NodeId("G_1"), NodeId("G_2"));
  g.add_edge(NodeId("G_2"), NodeId("G_3"));
  g.add_edge(NodeId("G_1"), NodeId("G_3"));
  NodeIdSet eps{NodeId("G_1"), NodeId("G_2"), NodeId("G_3")};
  NodeIdPairSet expected{{NodeId("G_1"), NodeId("G_2")},
                         {NodeId("G_2"), NodeId("G_3")},
                         {NodeId("G_1"), NodeId("G_3")}};
  CHECK(induced_reachable_pairs(g, eps) == expected);
  CHECK(oracle_induced_reachable_pairs(g, eps) == expected);
}

TEST_CASE("unknown endpoint ids are rejected by name") {
  DiagramGraph g = chain_abc();
  CHECK_THROWS_WITH(reachable_pairs(g, {NodeId("G_9")}),
                    Catch::Matchers::ContainsSubstring("G_9"));
  CHECK_THROWS_WITH(induced_reachable_pairs(g, {NodeId("G_9")}),
                    Catch::Matchers::ContainsSubstring("G_9"));
}

TEST_CASE("self-loops are dropped and duplicate edges collapse") {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "a", NodeOrigin::parsed, {}});
  g.add_node({NodeId("G_2"), "b", NodeOrigin::parsed, {}});
  CHECK_FALSE(g.add_edge(NodeId("G_1"), NodeId("G_1")));
  CHECK(g.add_edge(NodeId("G_1"), NodeId("G_2")));
  CHECK_FALSE(g.add_edge(NodeId("G_1"), NodeId("G_2")));
  CHECK(g.edges().size() == 1);
}

TEST_CASE("random graphs: reachability equals matrix-squaring oracle, both modes") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    DiagramGraph g = testsupport::random_graph_distinct_texts(rng, 1, 12);
    NodeIdSet eps;
    std::uniform_real_distribution<double> p(0.0, 1.0);
    for (const auto& [id, _] : g.nodes())
      if (p(rng) < 0.6) eps.insert(id);
    CHECK(reachable_pairs(g, eps) == oracle_reachable_pairs(g, eps));
    CHECK(induced_reachable_pairs(g, eps) == oracle_induced_reachable_pairs(g, eps));
  }
}

TEST_CASE("reachable_pairs is monotone under edge insertion") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    DiagramGraph g = testsupport::random_graph_distinct_texts(rng, 3, 10);
    NodeIdSet eps;
    for (const auto& [id, _] : g.nodes()) eps.insert(id);
    NodeIdPairSet before = reachable_pairs(g, eps);

    std::vector<NodeId> ids(eps.begin(), eps.end());
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    NodeId a = ids[pick(rng)], b = ids[pick(rng)];
    if (a == b) continue;
    g.add_edge(a, b);
    NodeIdPairSet after = reachable_pairs(g, eps);
    for (const auto& pr : before) CHECK(after.contains(pr));
  }
}

TEST_CASE("induced pairs are a subset of full-graph pairs") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    DiagramGraph g = testsupport::random_graph_distinct_texts(rng, 1, 10);
    NodeIdSet eps;
    std::uniform_real_distribution<double> p(0.0, 1.0);
    for (const auto& [id, _] : g.nodes())
      if (p(rng) < 0.5) eps.insert(id);
    NodeIdPairSet full = reachable_pairs(g, eps);
    for (const auto& pr : induced_reachable_pairs(g, eps)) CHECK(full.contains(pr));
  }
}

TEST_CASE("serialization round-trips the empty graph") {
  DiagramGraph g;
  g.provenance = Provenance::generated;
  g.source_path = "x.svg";
  CHECK(parse_graph(serialize_graph(g)) == g);
}

TEST_CASE("serialization round-trips nodes, bboxes, and edges") {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "Encoder", NodeOrigin::parsed, BBox{1, 2, 3, 4}});
  g.add_node({NodeId("G_2"), "Decoder", NodeOrigin::model_added, {}});
  g.add_edge(NodeId("G_1"), NodeId("G_2"));
  CHECK(parse_graph(serialize_graph(g)) == g);
}

TEST_CASE("random graph serialization round-trip is the identity") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    DiagramGraph g = testsupport::random_graph_distinct_texts(rng, 0, 10);
    CHECK(parse_graph(serialize_graph(g)) == g);
  }
}

TEST_CASE("parse_graph error categories are distinct") {
  auto kind_of = [](const std::string& doc) {
    try {
      parse_graph(doc);
    } catch (const GraphError& e) {
      return e.kind();
    }
    FAIL("expected a GraphError");
    return GraphError::Kind::malformed_document;
  };

  CHECK(kind_of("not json") == GraphError::Kind::malformed_document);
  CHECK(kind_of(R"({"provenance":"reference","source_path":"","nodes":[
          {"id":"G_1","text":"a","origin":"parsed","bbox":null},
          {"id":"G_1","text":"b","origin":"parsed","bbox":null}],"edges":[]})") ==
        GraphError::Kind::duplicate_node);
  CHECK(kind_of(R"({"provenance":"reference","source_path":"","nodes":[
          {"id":"G_1","text":"a","origin":"parsed","bbox":null}],
          "edges":[{"source":"G_1","target":"G_9"}]})") ==
        GraphError::Kind::dangling_endpoint);
}

TEST_CASE("graph JSON field names are stable") {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "a", NodeOrigin::parsed, BBox{0, 0, 1, 1}});
  nlohmann::json doc = nlohmann::json::parse(serialize_graph(g));
  CHECK(doc.contains("provenance"));
  CHECK(doc.contains("source_path"));
  CHECK(doc.at("nodes")[0].contains("id"));
  CHECK(doc.at("nodes")[0].contains("text"));
  CHECK(doc.at("nodes")[0].contains("origin"));
  CHECK(doc.at("nodes")[0].at("bbox") == nlohmann::json({0.0, 0.0, 1.0, 1.0}));
  CHECK(doc.at("edges").is_array());
}
