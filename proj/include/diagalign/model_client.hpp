#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "diagalign/errors.hpp"
#include "diagalign/graph.hpp"
#include "diagalign/prompts.hpp"

namespace diagalign {

struct ModelEndpointConfig {
  std::string base_url;
  std::string model_name;
  std::string api_key_env_var;  // only the variable NAME is ever stored
  int max_retries = 3;
  std::chrono::seconds timeout{120};
  double temperature = 0.0;
  std::chrono::milliseconds backoff_base{2000};
};

// Edit set a model proposes for the draft node list.
struct RefinementDelta {
  struct Merge {
    NodeId keep_id;
    NodeId remove_id;
  };
  struct Add {
    std::string text;
  };
  struct Remove {
    NodeId id;
  };
  std::vector<Merge> merges;
  std::vector<Add> adds;
  std::vector<Remove> removes;

  bool empty() const { return merges.empty() && adds.empty() && removes.empty(); }
};

inline nlohmann::json delta_to_json(const RefinementDelta& d) {
  nlohmann::json merges = nlohmann::json::array();
  for (const auto& m : d.merges)
    merges.push_back({{"keep_id", m.keep_id.value}, {"remove_id", m.remove_id.value}});
  nlohmann::json adds = nlohmann::json::array();
  for (const auto& a : d.adds) adds.push_back({{"text", a.text}});
  nlohmann::json removes = nlohmann::json::array();
  for (const auto& r : d.removes) removes.push_back({{"id", r.id.value}});
  return {{"merges", merges}, {"adds", adds}, {"removes", removes}};
}

// --- Transports -------------------------------------------------------------

class ModelTransport {
public:
  virtual ~ModelTransport() = default;
  virtual std::string complete(const Prompt& prompt) = 0;
};

inline std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

// Content hash identifying a prompt (text parts plus attachment digests).
inline std::string prompt_hash(const Prompt& prompt) {
  std::string material;
  for (const PromptPart& p : prompt.parts) {
    if (p.kind == PromptPart::Kind::text) {
      material += "text:";
      material += p.text;
    } else {
      material += "attachment:" + p.mime_type + ":" + sha256_hex(p.data.data(), p.data.size());
    }
    material += '\n';
  }
  return sha256_hex(material.data(), material.size());
}

// Deterministic offline backend: replays recorded replies keyed by prompt
// hash from `<fixtures>/<hash-prefix>.json` files holding
// {"prompt_hash": ..., "reply_text": ...}.
class MockTransport : public ModelTransport {
public:
  static constexpr std::size_t kPrefixLen = 16;

  explicit MockTransport(std::filesystem::path fixtures_dir)
      : fixtures_dir_(std::move(fixtures_dir)) {}

  std::string complete(const Prompt& prompt) override {
    std::string hash = prompt_hash(prompt);
    auto path = fixture_path(hash);
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw ProtocolError("mock transport: no fixture for prompt hash " + hash + " at " +
                              path.string(),
                          "");
    nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.value("prompt_hash", "") != hash)
      throw ProtocolError("mock transport: fixture " + path.string() + " hash mismatch", "");
    return doc.at("reply_text").get<std::string>();
  }

  // Used by tests and tooling to record fixtures.
  void record(const Prompt& prompt, const std::string& reply_text) const {
    std::string hash = prompt_hash(prompt);
    std::filesystem::create_directories(fixtures_dir_);
    std::ofstream out(fixture_path(hash), std::ios::binary);
    out << nlohmann::json{{"prompt_hash", hash}, {"reply_text", reply_text}}.dump(2);
  }

  std::filesystem::path fixture_path(const std::string& hash) const {
    return fixtures_dir_ / (hash.substr(0, kPrefixLen) + ".json");
  }

private:
  std::filesystem::path fixtures_dir_;
};

// --- Reply parsing ----------------------------------------------------------

namespace detail {

inline std::string strip_code_fences(std::string s) {
  auto first = s.find("```");
  if (first == std::string::npos) return s;
  auto body_start = s.find('\n', first);
  if (body_start == std::string::npos) return s;
  auto close = s.rfind("```");
  if (close == first) return s;
  return s.substr(body_start + 1, close - body_start - 1);
}

// JSON payload after the LAST occurrence of `signal`, tolerating fences.
inline nlohmann::json json_after_signal(const std::string& reply, const std::string& signal) {
  auto pos = reply.rfind(signal);
  if (pos == std::string::npos)
    throw ProtocolError("reply does not contain signal \"" + signal + "\"", reply);
  std::string payload = strip_code_fences(reply.substr(pos + signal.size()));
  try {
    return nlohmann::json::parse(payload);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("undecodable JSON after signal: ") + e.what(), reply);
  }
}

}  // namespace detail

inline constexpr const char* kRefinementSignal = "FINAL ANSWER:";
inline constexpr const char* kEdgeSignal = "Final Answer JSON:";

inline RefinementDelta parse_refinement_reply(const std::string& reply) {
  nlohmann::json doc = detail::json_after_signal(reply, kRefinementSignal);
  if (!doc.is_object()) throw ProtocolError("refinement reply is not a JSON object", reply);
  RefinementDelta delta;
  try {
    for (const auto& m : doc.value("merges", nlohmann::json::array()))
      delta.merges.push_back({NodeId(m.at("keep_id").get<std::string>()),
                              NodeId(m.at("remove_id").get<std::string>())});
    for (const auto& a : doc.value("adds", nlohmann::json::array()))
      delta.adds.push_back({a.at("text").get<std::string>()});
    for (const auto& r : doc.value("removes", nlohmann::json::array()))
      delta.removes.push_back({NodeId(r.at("id").get<std::string>())});
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed refinement delta: ") + e.what(), reply);
  }
  return delta;
}

inline std::vector<std::pair<NodeId, NodeId>> parse_edge_reply(const std::string& reply) {
  nlohmann::json doc = detail::json_after_signal(reply, kEdgeSignal);
  if (!doc.is_array()) throw ProtocolError("edge reply is not a JSON list", reply);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& e : doc) {
    if (!e.is_array() || e.size() != 2)
      throw ProtocolError("edge entry is not a two-element list", reply);
    pairs.emplace_back(NodeId(e[0].get<std::string>()), NodeId(e[1].get<std::string>()));
  }
  return pairs;
}

// --- Refinement application -------------------------------------------------

// Validates a delta against the draft without mutating anything. Simulates
// merges in listed order: a remove_id consumed by an earlier merge is an
// error, as is any id absent from the draft.
inline void validate_refinement(const DiagramGraph& draft, const RefinementDelta& delta) {
  NodeIdSet live;
  for (const auto& [id, _] : draft.nodes()) live.insert(id);
  for (const auto& m : delta.merges) {
    if (m.keep_id == m.remove_id)
      throw ValidationError("merge keep_id equals remove_id: " + m.keep_id.value);
    if (!live.contains(m.keep_id))
      throw ValidationError("merge keep_id not in draft: " + m.keep_id.value);
    if (!live.contains(m.remove_id))
      throw ValidationError("merge remove_id not in draft: " + m.remove_id.value);
    live.erase(m.remove_id);
  }
  for (const auto& r : delta.removes)
    if (!live.contains(r.id)) throw ValidationError("remove id not in draft: " + r.id.value);
  for (const auto& a : delta.adds)
    if (a.text.empty()) throw ValidationError("added node has empty text");
}

// Applies a validated delta, returning a new graph (all-or-nothing; the
// draft is never mutated).
inline DiagramGraph apply_refinement(const DiagramGraph& draft, const RefinementDelta& delta) {
  validate_refinement(draft, delta);
  DiagramGraph result = draft;
  // Merges: append remove_id's text to keep_id, union bboxes, drop remove_id.
  std::map<NodeId, TextNode> nodes(result.nodes().begin(), result.nodes().end());
  for (const auto& m : delta.merges) {
    TextNode& keep = nodes.at(m.keep_id);
    const TextNode& gone = nodes.at(m.remove_id);
    keep.text += " " + gone.text;
    if (keep.bbox && gone.bbox)
      keep.bbox = keep.bbox->united(*gone.bbox);
    else if (!keep.bbox)
      keep.bbox = gone.bbox;
    nodes.erase(m.remove_id);
  }
  DiagramGraph merged;
  merged.provenance = draft.provenance;
  merged.source_path = draft.source_path;
  for (auto& [_, n] : nodes) merged.add_node(n);
  for (const DirectedEdge& e : draft.edges())
    if (merged.has_node(e.source) && merged.has_node(e.target)) merged.add_edge(e.source, e.target);

  std::uint64_t next = merged.next_index();
  for (const auto& a : delta.adds) {
    TextNode n;
    n.id = NodeId::indexed(next++);
    n.text = a.text;
    n.origin = NodeOrigin::model_added;
    merged.add_node(std::move(n));
  }
  for (const auto& r : delta.removes) merged.remove_node(r.id);
  return merged;
}

// --- Client -----------------------------------------------------------------

// Wraps a transport with retry/backoff and the signal-anchored reply parsing
// for each protocol. A parse or validation failure triggers a full resend of
// the identical prompt; after max_retries the last raw reply is surfaced.
class ModelClient {
public:
  using SleepFn = std::function<void(std::chrono::milliseconds)>;

  ModelClient(std::shared_ptr<ModelTransport> transport, ModelEndpointConfig config)
      : transport_(std::move(transport)), config_(std::move(config)) {}

  const ModelEndpointConfig& config() const { return config_; }

  // Test hook; defaults to std::this_thread::sleep_for.
  void set_sleep(SleepFn fn) { sleep_ = std::move(fn); }

  RefinementDelta refine_nodes(const std::vector<std::uint8_t>& image, const DiagramGraph& draft,
                               const std::string& diagram_type_name = "diagram") {
    Prompt prompt =
        prompts::node_refinement(diagram_type_name, element_list_string(draft), image);
    return with_retries<RefinementDelta>([&](const std::string& reply) {
      RefinementDelta delta = parse_refinement_reply(reply);
      try {
        validate_refinement(draft, delta);
      } catch (const ValidationError& e) {
        throw ProtocolError(std::string("refinement delta failed validation: ") + e.what(), reply);
      }
      return delta;
    }, prompt);
  }

  std::set<DirectedEdge> extract_edges(const std::vector<std::uint8_t>& image,
                                       const DiagramGraph& nodes,
                                       const std::string& diagram_type = "diagram") {
    Prompt prompt = prompts::edge_extraction(diagram_type, element_list_string(nodes), image);
    return with_retries<std::set<DirectedEdge>>([&](const std::string& reply) {
      std::set<DirectedEdge> edges;
      for (const auto& [src, dst] : parse_edge_reply(reply)) {
        if (!nodes.has_node(src))
          throw ProtocolError("edge endpoint not in node list: " + src.value, reply);
        if (!nodes.has_node(dst))
          throw ProtocolError("edge endpoint not in node list: " + dst.value, reply);
        if (src == dst) continue;  // self-loops dropped
        edges.insert({src, dst});
      }
      return edges;
    }, prompt);
  }

  std::string generate_layout_caption(const std::vector<std::uint8_t>& document,
                                      const std::string& mime_type) {
    Prompt prompt = prompts::layout_caption(document, mime_type);
    return with_retries<std::string>([&](const std::string& reply) {
      if (reply.empty()) throw ProtocolError("empty layout caption reply", reply);
      return reply;
    }, prompt);
  }

  // Candidate SVG: the substring from the first "<svg" to the last "</svg>".
  std::string generate_diagram(const std::string& paper_context, const std::string& caption,
                               const std::optional<std::string>& layout_caption) {
    if (paper_context.empty()) throw InputError("paper context must be non-empty");
    Prompt prompt = prompts::diagram_generation(paper_context, caption, layout_caption);
    std::string reply = with_retries<std::string>(
        [](const std::string& r) { return r; }, prompt);
    auto begin = reply.find("<svg");
    auto end = reply.rfind("</svg>");
    if (begin == std::string::npos || end == std::string::npos || end < begin)
      throw GenerationError("reply contains no SVG block", reply);
    return reply.substr(begin, end + 6 - begin);
  }

private:
  std::shared_ptr<ModelTransport> transport_;
  ModelEndpointConfig config_;
  SleepFn sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

  template <typename T, typename ParseFn>
  T with_retries(ParseFn parse, const Prompt& prompt) {
    std::string last_error = "model call never attempted";
    std::string last_reply;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) sleep_(config_.backoff_base * (1 << (attempt - 1)));
      try {
        last_reply = transport_->complete(prompt);
      } catch (const Error& e) {
        last_error = e.what();
        continue;
      }
      try {
        return parse(last_reply);
      } catch (const ProtocolError& e) {
        last_error = e.what();
      }
    }
    throw ProtocolError("model call failed after " + std::to_string(config_.max_retries + 1) +
                            " attempts: " + last_error,
                        last_reply);
  }
};

}  // namespace diagalign
