#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diagalign/errors.hpp"

namespace diagalign {

// Node identifier of the form "G_<n>", n >= 1. The same token format is
// used when listing elements in model prompts.
struct NodeId {
  std::string value;

  NodeId() = default;
  explicit NodeId(std::string v) : value(std::move(v)) {}

  static NodeId indexed(std::uint64_t n) { return NodeId("G_" + std::to_string(n)); }

  // Numeric suffix, or nullopt when the token is not of the "G_<n>" form.
  std::optional<std::uint64_t> index() const {
    if (value.size() < 3 || value[0] != 'G' || value[1] != '_') return std::nullopt;
    std::uint64_t n = 0;
    for (std::size_t i = 2; i < value.size(); ++i) {
      char c = value[i];
      if (c < '0' || c > '9') return std::nullopt;
      n = n * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return n == 0 ? std::nullopt : std::optional<std::uint64_t>(n);
  }

  auto operator<=>(const NodeId&) const = default;
};

struct BBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  BBox united(const BBox& o) const {
    return {std::min(x_min, o.x_min), std::min(y_min, o.y_min),
            std::max(x_max, o.x_max), std::max(y_max, o.y_max)};
  }
  bool operator==(const BBox&) const = default;
};

enum class NodeOrigin { parsed, model_added };

inline const char* to_string(NodeOrigin o) {
  return o == NodeOrigin::parsed ? "parsed" : "model_added";
}

struct TextNode {
  NodeId id;
  std::string text;
  NodeOrigin origin = NodeOrigin::parsed;
  std::optional<BBox> bbox;

  bool operator==(const TextNode&) const = default;
};

struct DirectedEdge {
  NodeId source;
  NodeId target;

  auto operator<=>(const DirectedEdge&) const = default;
};

enum class Provenance { reference, generated };

inline const char* to_string(Provenance p) {
  return p == Provenance::reference ? "reference" : "generated";
}

using NodeIdSet = std::set<NodeId>;
using NodeIdPair = std::pair<NodeId, NodeId>;
using NodeIdPairSet = std::set<NodeIdPair>;

// Directed graph of text-labeled nodes. Nodes are keyed by id; edges have
// set semantics and self-loops are silently dropped.
class DiagramGraph {
public:
  Provenance provenance = Provenance::reference;
  std::string source_path;

  const std::map<NodeId, TextNode>& nodes() const { return nodes_; }
  const std::set<DirectedEdge>& edges() const { return edges_; }

  bool has_node(const NodeId& id) const { return nodes_.contains(id); }

  const TextNode& node(const NodeId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
      throw GraphError(GraphError::Kind::unknown_node, "unknown node id: " + id.value);
    return it->second;
  }

  void add_node(TextNode n) {
    if (nodes_.contains(n.id))
      throw GraphError(GraphError::Kind::duplicate_node, "duplicate node id: " + n.id.value);
    NodeId id = n.id;
    nodes_.emplace(std::move(id), std::move(n));
  }

  // Returns false when the edge is a self-loop (dropped) or already present.
  bool add_edge(const NodeId& source, const NodeId& target) {
    if (!nodes_.contains(source))
      throw GraphError(GraphError::Kind::dangling_endpoint,
                       "edge endpoint not in graph: " + source.value);
    if (!nodes_.contains(target))
      throw GraphError(GraphError::Kind::dangling_endpoint,
                       "edge endpoint not in graph: " + target.value);
    if (source == target) return false;
    return edges_.insert({source, target}).second;
  }

  void remove_node(const NodeId& id) {
    nodes_.erase(id);
    std::erase_if(edges_, [&](const DirectedEdge& e) { return e.source == id || e.target == id; });
  }

  // Smallest n such that "G_n" is unused by any existing "G_<k>" id.
  std::uint64_t next_index() const {
    std::uint64_t max_n = 0;
    for (const auto& [id, _] : nodes_)
      if (auto n = id.index()) max_n = std::max(max_n, *n);
    return max_n + 1;
  }

  bool operator==(const DiagramGraph& o) const {
    return provenance == o.provenance && source_path == o.source_path &&
           nodes_ == o.nodes_ && edges_ == o.edges_;
  }

private:
  std::map<NodeId, TextNode> nodes_;
  std::set<DirectedEdge> edges_;
};

namespace detail {

inline void check_endpoints(const DiagramGraph& graph, const NodeIdSet& endpoints) {
  for (const NodeId& id : endpoints)
    if (!graph.has_node(id))
      throw GraphError(GraphError::Kind::unknown_node, "unknown endpoint id: " + id.value);
}

// BFS over an adjacency map from `start`; marks every reached node in `seen`.
inline NodeIdSet bfs_reach(const std::map<NodeId, std::vector<NodeId>>& adj, const NodeId& start) {
  NodeIdSet seen;
  std::deque<NodeId> queue{start};
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (const NodeId& v : it->second)
      if (seen.insert(v).second) queue.push_back(v);
  }
  return seen;
}

inline NodeIdPairSet reachable_pairs_impl(const std::map<NodeId, std::vector<NodeId>>& adj,
                                          const NodeIdSet& endpoints) {
  NodeIdPairSet result;
  for (const NodeId& u : endpoints) {
    NodeIdSet reached = bfs_reach(adj, u);
    for (const NodeId& v : endpoints)
      if (v != u && reached.contains(v)) result.insert({u, v});
  }
  return result;
}

}  // namespace detail

// Ordered pairs (u, v) of distinct endpoints such that v is reachable from u
// by a directed path in the full graph. Paths may pass through nodes outside
// the endpoint set.
inline NodeIdPairSet reachable_pairs(const DiagramGraph& graph, const NodeIdSet& endpoints) {
  detail::check_endpoints(graph, endpoints);
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const DirectedEdge& e : graph.edges()) adj[e.source].push_back(e.target);
  return detail::reachable_pairs_impl(adj, endpoints);
}

// Same, but paths are confined to the subgraph induced by the endpoint set:
// edges touching any node outside it are discarded before the walk.
inline NodeIdPairSet induced_reachable_pairs(const DiagramGraph& graph, const NodeIdSet& endpoints) {
  detail::check_endpoints(graph, endpoints);
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const DirectedEdge& e : graph.edges())
    if (endpoints.contains(e.source) && endpoints.contains(e.target))
      adj[e.source].push_back(e.target);
  return detail::reachable_pairs_impl(adj, endpoints);
}

// --- On-disk graph format -------------------------------------------------
//
// {"provenance": "reference"|"generated", "source_path": "...",
//  "nodes": [{"id","text","origin","bbox":[x0,y0,x1,y1]|null}, ...],
//  "edges": [{"source","target"}, ...]}

inline nlohmann::json graph_to_json(const DiagramGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, n] : g.nodes()) {
    nlohmann::json jn{{"id", id.value}, {"text", n.text}, {"origin", to_string(n.origin)}};
    if (n.bbox)
      jn["bbox"] = {n.bbox->x_min, n.bbox->y_min, n.bbox->x_max, n.bbox->y_max};
    else
      jn["bbox"] = nullptr;
    nodes.push_back(std::move(jn));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const DirectedEdge& e : g.edges())
    edges.push_back({{"source", e.source.value}, {"target", e.target.value}});
  return {{"provenance", to_string(g.provenance)},
          {"source_path", g.source_path},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

inline std::string serialize_graph(const DiagramGraph& g) { return graph_to_json(g).dump(2); }

inline DiagramGraph graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
    throw GraphError(GraphError::Kind::malformed_document,
                     "graph document must be an object with nodes and edges");
  DiagramGraph g;
  std::string prov = doc.value("provenance", "reference");
  if (prov == "reference")
    g.provenance = Provenance::reference;
  else if (prov == "generated")
    g.provenance = Provenance::generated;
  else
    throw GraphError(GraphError::Kind::malformed_document, "unknown provenance: " + prov);
  g.source_path = doc.value("source_path", "");

  for (const auto& jn : doc.at("nodes")) {
    TextNode n;
    n.id = NodeId(jn.at("id").get<std::string>());
    n.text = jn.at("text").get<std::string>();
    std::string origin = jn.value("origin", "parsed");
    if (origin == "parsed")
      n.origin = NodeOrigin::parsed;
    else if (origin == "model_added")
      n.origin = NodeOrigin::model_added;
    else
      throw GraphError(GraphError::Kind::malformed_document, "unknown origin: " + origin);
    if (jn.contains("bbox") && !jn.at("bbox").is_null()) {
      const auto& b = jn.at("bbox");
      if (!b.is_array() || b.size() != 4)
        throw GraphError(GraphError::Kind::malformed_document, "bbox must be [x0,y0,x1,y1]");
      n.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    }
    g.add_node(std::move(n));
  }
  for (const auto& je : doc.at("edges"))
    g.add_edge(NodeId(je.at("source").get<std::string>()), NodeId(je.at("target").get<std::string>()));
  return g;
}

inline DiagramGraph parse_graph(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw GraphError(GraphError::Kind::malformed_document,
                     std::string("malformed graph JSON: ") + e.what());
  }
  try {
    return graph_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(GraphError::Kind::malformed_document,
                     std::string("malformed graph document: ") + e.what());
  }
}

}  // namespace diagalign
