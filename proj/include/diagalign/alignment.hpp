#pragma once

#include <algorithm>
#include <cctype>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "diagalign/graph.hpp"

namespace diagalign {

enum class PathMode { full_graph, induced };

inline const char* to_string(PathMode m) {
  return m == PathMode::full_graph ? "full_graph" : "induced";
}

struct MatchConfig {
  double similarity_threshold = 0.80;
  PathMode path_mode = PathMode::full_graph;
};

struct MatchedPair {
  NodeId gen_id;
  NodeId ref_id;
  double similarity = 0;

  bool operator==(const MatchedPair&) const = default;
};

// One-to-one correspondence between generated and reference nodes.
struct NodeMatching {
  std::vector<MatchedPair> pairs;
};

struct MetricTriple {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;

  bool operator==(const MetricTriple&) const = default;
};

struct AlignmentReport {
  MetricTriple node;
  MetricTriple path;
  bool path_degenerate = false;
  NodeMatching matching;
  std::vector<NodeId> unmatched_gen;
  std::vector<NodeId> unmatched_ref;
};

// --- Text similarity --------------------------------------------------------

namespace detail {

inline bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

// Case-fold, trim, collapse internal whitespace, strip edge punctuation.
inline std::string normalize_text(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char ch : s) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      in_space = !out.empty();
    } else {
      if (in_space) out += ' ';
      out += static_cast<char>(std::tolower(c));
      in_space = false;
    }
  }
  std::size_t begin = 0, end = out.size();
  while (begin < end && is_punct(static_cast<unsigned char>(out[begin]))) ++begin;
  while (end > begin && is_punct(static_cast<unsigned char>(out[end - 1]))) --end;
  // re-trim spaces exposed by punctuation stripping
  while (begin < end && out[begin] == ' ') ++begin;
  while (end > begin && out[end - 1] == ' ') --end;
  return out.substr(begin, end - begin);
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t next_diag = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      diag = next_diag;
    }
  }
  return row[b.size()];
}

}  // namespace detail

// Normalized edit-distance similarity in [0, 1]. Symmetric; 1.0 iff the
// normalized forms are equal (both empty counts as equal).
inline double text_similarity(std::string_view a, std::string_view b) {
  std::string na = detail::normalize_text(a);
  std::string nb = detail::normalize_text(b);
  std::size_t max_len = std::max(na.size(), nb.size());
  if (max_len == 0) return 1.0;
  std::size_t dist = detail::edit_distance(na, nb);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(max_len);
}

// --- Node matching ----------------------------------------------------------

// Greedy one-to-one matching: all cross similarities, accepted in descending
// similarity order, ties broken by (gen id, ref id) lexicographic order.
inline NodeMatching match_nodes(const DiagramGraph& gen, const DiagramGraph& ref,
                                const MatchConfig& config) {
  struct Candidate {
    double similarity;
    NodeId gen_id;
    NodeId ref_id;
  };
  std::vector<Candidate> candidates;
  for (const auto& [gid, gnode] : gen.nodes()) {
    for (const auto& [rid, rnode] : ref.nodes()) {
      double sim = text_similarity(gnode.text, rnode.text);
      if (sim >= config.similarity_threshold) candidates.push_back({sim, gid, rid});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return std::tie(a.gen_id, a.ref_id) < std::tie(b.gen_id, b.ref_id);
  });

  NodeMatching matching;
  NodeIdSet used_gen, used_ref;
  for (const Candidate& c : candidates) {
    if (used_gen.contains(c.gen_id) || used_ref.contains(c.ref_id)) continue;
    used_gen.insert(c.gen_id);
    used_ref.insert(c.ref_id);
    matching.pairs.push_back({c.gen_id, c.ref_id, c.similarity});
  }
  return matching;
}

// --- Metrics ----------------------------------------------------------------

namespace detail {

// Zero-denominator convention: a family where nothing exists on either side
// is perfect agreement (1.0); a one-sided zero denominator scores 0.
inline MetricTriple prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  MetricTriple m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  if (tp + fp == 0 && tp + fn == 0) {
    m.precision = m.recall = m.f1 = 1.0;
    return m;
  }
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace detail

inline MetricTriple node_alignment(const DiagramGraph& gen, const DiagramGraph& ref,
                                   const NodeMatching& matching) {
  std::size_t tp = matching.pairs.size();
  return detail::prf(tp, gen.nodes().size() - tp, ref.nodes().size() - tp);
}

struct PathMetrics {
  MetricTriple triple;
  bool degenerate = false;
};

inline PathMetrics path_alignment(const DiagramGraph& gen, const DiagramGraph& ref,
                                  const NodeMatching& matching, const MatchConfig& config) {
  PathMetrics out;
  if (matching.pairs.size() < 2) {
    out.degenerate = true;
    return out;  // no ordered pair exists; all counts and metrics zero
  }
  NodeIdSet gen_endpoints, ref_endpoints;
  std::map<NodeId, NodeId> ref_to_gen;
  for (const MatchedPair& p : matching.pairs) {
    gen_endpoints.insert(p.gen_id);
    ref_endpoints.insert(p.ref_id);
    ref_to_gen[p.ref_id] = p.gen_id;
  }
  auto reach = config.path_mode == PathMode::full_graph ? reachable_pairs : induced_reachable_pairs;
  NodeIdPairSet p_gen = reach(gen, gen_endpoints);
  // Map reference pairs into gen-id space through the matching bijection.
  NodeIdPairSet p_ref;
  for (const auto& [u, v] : reach(ref, ref_endpoints))
    p_ref.insert({ref_to_gen.at(u), ref_to_gen.at(v)});

  std::size_t tp = 0;
  for (const auto& pr : p_gen)
    if (p_ref.contains(pr)) ++tp;
  out.triple = detail::prf(tp, p_gen.size() - tp, p_ref.size() - tp);
  return out;
}

inline AlignmentReport evaluate_pair(const DiagramGraph& gen, const DiagramGraph& ref,
                                     const MatchConfig& config) {
  AlignmentReport report;
  report.matching = match_nodes(gen, ref, config);
  report.node = node_alignment(gen, ref, report.matching);
  PathMetrics pm = path_alignment(gen, ref, report.matching, config);
  report.path = pm.triple;
  report.path_degenerate = pm.degenerate;

  NodeIdSet matched_gen, matched_ref;
  for (const MatchedPair& p : report.matching.pairs) {
    matched_gen.insert(p.gen_id);
    matched_ref.insert(p.ref_id);
  }
  for (const auto& [id, _] : gen.nodes())
    if (!matched_gen.contains(id)) report.unmatched_gen.push_back(id);
  for (const auto& [id, _] : ref.nodes())
    if (!matched_ref.contains(id)) report.unmatched_ref.push_back(id);
  return report;
}

// --- Report JSON ------------------------------------------------------------

inline nlohmann::json metric_triple_to_json(const MetricTriple& m) {
  return {{"tp", m.tp},       {"fp", m.fp},         {"fn", m.fn},
          {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json report_to_json(const AlignmentReport& r) {
  nlohmann::json path = metric_triple_to_json(r.path);
  path["degenerate"] = r.path_degenerate;
  nlohmann::json pairs = nlohmann::json::array();
  for (const MatchedPair& p : r.matching.pairs)
    pairs.push_back(
        {{"gen_id", p.gen_id.value}, {"ref_id", p.ref_id.value}, {"similarity", p.similarity}});
  nlohmann::json unmatched_gen = nlohmann::json::array();
  for (const NodeId& id : r.unmatched_gen) unmatched_gen.push_back(id.value);
  nlohmann::json unmatched_ref = nlohmann::json::array();
  for (const NodeId& id : r.unmatched_ref) unmatched_ref.push_back(id.value);
  return {{"node", metric_triple_to_json(r.node)},
          {"path", std::move(path)},
          {"matching", std::move(pairs)},
          {"unmatched_gen", std::move(unmatched_gen)},
          {"unmatched_ref", std::move(unmatched_ref)}};
}

inline AlignmentReport report_from_json(const nlohmann::json& doc) {
  auto triple = [](const nlohmann::json& j) {
    MetricTriple m;
    m.tp = j.at("tp").get<std::size_t>();
    m.fp = j.at("fp").get<std::size_t>();
    m.fn = j.at("fn").get<std::size_t>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    return m;
  };
  AlignmentReport r;
  r.node = triple(doc.at("node"));
  r.path = triple(doc.at("path"));
  r.path_degenerate = doc.at("path").value("degenerate", false);
  for (const auto& jp : doc.value("matching", nlohmann::json::array()))
    r.matching.pairs.push_back({NodeId(jp.at("gen_id").get<std::string>()),
                                NodeId(jp.at("ref_id").get<std::string>()),
                                jp.at("similarity").get<double>()});
  for (const auto& id : doc.value("unmatched_gen", nlohmann::json::array()))
    r.unmatched_gen.push_back(NodeId(id.get<std::string>()));
  for (const auto& id : doc.value("unmatched_ref", nlohmann::json::array()))
    r.unmatched_ref.push_back(NodeId(id.get<std::string>()));
  return r;
}

}  // namespace diagalign
