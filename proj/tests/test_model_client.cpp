#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <filesystem>
#include <memory>

#include "diagalign/model_client.hpp"
#include "diagalign/prompts.hpp"
#include "golden_prompts.hpp"

using namespace diagalign;

namespace {

// Transport returning scripted replies in order; records every prompt sent.
class ScriptedTransport : public ModelTransport {
public:
  explicit ScriptedTransport(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const Prompt& prompt) override {
    sent.push_back(prompt);
    if (calls >= replies_.size()) throw ProtocolError("script exhausted", "");
    return replies_[calls++];
  }

  std::vector<Prompt> sent;
  std::size_t calls = 0;

private:
  std::vector<std::string> replies_;
};

ModelClient make_client(std::shared_ptr<ModelTransport> transport, int max_retries = 3) {
  ModelEndpointConfig cfg;
  cfg.max_retries = max_retries;
  cfg.backoff_base = std::chrono::milliseconds(0);
  ModelClient client(std::move(transport), cfg);
  client.set_sleep([](std::chrono::milliseconds) {});
  return client;
}

DiagramGraph three_node_draft() {
  DiagramGraph g;
  g.add_node({NodeId("G_1"), "Multi-Head", NodeOrigin::parsed, BBox{0, 0, 10, 10}});
  g.add_node({NodeId("G_2"), "Attention", NodeOrigin::parsed, BBox{0, 10, 10, 20}});
  g.add_node({NodeId("G_3"), "Softmax", NodeOrigin::parsed, BBox{0, 30, 10, 40}});
  return g;
}

const std::vector<std::uint8_t> kImage{0x89, 'P', 'N', 'G', 1, 2, 3};

}  // namespace

// --- reply parsing ------------------------------------------------------------

TEST_CASE("refinement: empty JSON object after the signal yields an empty delta") {
  RefinementDelta d = parse_refinement_reply("THINKING PHASE: blah blah\nFINAL ANSWER: {}");
  CHECK(d.empty());
}

TEST_CASE("refinement: merges decode with keep and remove ids") {
  RefinementDelta d = parse_refinement_reply(
      R"(FINAL ANSWER: {"merges":[{"keep_id":"G_1","remove_id":"G_2"}]})");
  REQUIRE(d.merges.size() == 1);
  CHECK(d.merges[0].keep_id == NodeId("G_1"));
  CHECK(d.merges[0].remove_id == NodeId("G_2"));
}

TEST_CASE("parsing anchors on the LAST signal occurrence") {
  std::string reply =
      "I will print FINAL ANSWER: later. Some draft: FINAL ANSWER: {\"adds\":[{\"text\":\"no\"}]}\n"
      "Actually, FINAL ANSWER: {}";
  CHECK(parse_refinement_reply(reply).empty());
}

TEST_CASE("code fences around the JSON payload are tolerated") {
  RefinementDelta d = parse_refinement_reply(
      "FINAL ANSWER:\n```json\n{\"removes\":[{\"id\":\"G_3\"}]}\n```");
  REQUIRE(d.removes.size() == 1);
  CHECK(d.removes[0].id == NodeId("G_3"));
}

TEST_CASE("edge replies decode id pairs after the edge signal") {
  auto pairs = parse_edge_reply(
      "step 1... step 2...\nFinal Answer JSON: [[\"G_1\",\"G_2\"],[\"G_1\",\"G_3\"]]");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair{NodeId("G_1"), NodeId("G_2")});
}

TEST_CASE("an empty edge list is a valid result") {
  CHECK(parse_edge_reply("Final Answer JSON: []").empty());
}

TEST_CASE("missing signal or broken JSON throws with the raw reply attached") {
  try {
    parse_refinement_reply("no signal here");
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.raw_reply() == "no signal here");
  }
  CHECK_THROWS_AS(parse_refinement_reply("FINAL ANSWER: {nope"), ProtocolError);
  CHECK_THROWS_AS(parse_edge_reply("Final Answer JSON: {\"not\":\"a list\"}"), ProtocolError);
}

// --- client operations ---------------------------------------------------------

TEST_CASE("refine_nodes retries on invalid ids, then succeeds") {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<std::string>{
      R"(FINAL ANSWER: {"removes":[{"id":"G_99"}]})",
      R"(FINAL ANSWER: {"merges":[{"keep_id":"G_1","remove_id":"G_2"}]})"});
  ModelClient client = make_client(transport);
  RefinementDelta d = client.refine_nodes(kImage, three_node_draft());
  CHECK(transport->calls == 2);
  REQUIRE(d.merges.size() == 1);
}

TEST_CASE("refine_nodes surfaces the raw reply after retries are exhausted") {
  auto transport = std::make_shared<ScriptedTransport>(
      std::vector<std::string>{"junk", "junk", "junk"});
  ModelClient client = make_client(transport, 2);
  try {
    client.refine_nodes(kImage, three_node_draft());
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(transport->calls == 3);
    CHECK(e.raw_reply() == "junk");
  }
}

TEST_CASE("extract_edges validates ids, drops self-loops and duplicates") {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<std::string>{
      "Final Answer JSON: [[\"G_1\",\"G_2\"],[\"G_1\",\"G_1\"],[\"G_1\",\"G_2\"],[\"G_2\",\"G_3\"]]"});
  ModelClient client = make_client(transport);
  std::set<DirectedEdge> edges = client.extract_edges(kImage, three_node_draft());
  CHECK(edges == std::set<DirectedEdge>{{NodeId("G_1"), NodeId("G_2")},
                                        {NodeId("G_2"), NodeId("G_3")}});
}

TEST_CASE("extract_edges rejects ids outside the node list and retries") {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<std::string>{
      "Final Answer JSON: [[\"G_1\",\"G_7\"]]", "Final Answer JSON: []"});
  ModelClient client = make_client(transport);
  CHECK(client.extract_edges(kImage, three_node_draft()).empty());
  CHECK(transport->calls == 2);
}

TEST_CASE("generate_layout_caption passes the caption through and rejects empty replies") {
  auto ok = std::make_shared<ScriptedTransport>(std::vector<std::string>{"A is above B"});
  CHECK(make_client(ok).generate_layout_caption(kImage, "image/png") == "A is above B");

  auto empty = std::make_shared<ScriptedTransport>(std::vector<std::string>{"", "", "", ""});
  CHECK_THROWS_AS(make_client(empty).generate_layout_caption(kImage, "image/png"), ProtocolError);
}

TEST_CASE("generate_diagram extracts the SVG block and strips surrounding prose") {
  std::string svg = "<svg width=\"10\"><text x=\"1\" y=\"1\">hi</text></svg>";
  auto transport = std::make_shared<ScriptedTransport>(
      std::vector<std::string>{"Sure, here is the diagram:\n" + svg + "\nHope it helps!"});
  ModelClient client = make_client(transport);
  CHECK(client.generate_diagram("ctx", "cap", std::nullopt) == svg);
}

TEST_CASE("generate_diagram without an SVG block is a generation error") {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<std::string>{"no diagram"});
  ModelClient client = make_client(transport);
  CHECK_THROWS_AS(client.generate_diagram("ctx", "cap", std::nullopt), GenerationError);
}

// --- apply_refinement -----------------------------------------------------------

TEST_CASE("empty delta leaves the graph unchanged") {
  DiagramGraph draft = three_node_draft();
  CHECK(apply_refinement(draft, RefinementDelta{}) == draft);
}

TEST_CASE("merge joins texts, unions bboxes, and shrinks the node count") {
  DiagramGraph draft = three_node_draft();
  RefinementDelta delta;
  delta.merges.push_back({NodeId("G_1"), NodeId("G_2")});
  DiagramGraph out = apply_refinement(draft, delta);
  CHECK(out.nodes().size() == 2);
  CHECK(out.node(NodeId("G_1")).text == "Multi-Head Attention");
  CHECK(out.node(NodeId("G_1")).bbox == BBox{0, 0, 10, 20});
  CHECK_FALSE(out.has_node(NodeId("G_2")));
  CHECK(draft.nodes().size() == 3);  // input untouched
}

TEST_CASE("adds create model_added nodes with fresh ids and no bbox") {
  DiagramGraph draft = three_node_draft();
  RefinementDelta delta;
  delta.adds.push_back({"LLM Model (OpenAI)"});
  DiagramGraph out = apply_refinement(draft, delta);
  REQUIRE(out.has_node(NodeId("G_4")));
  CHECK(out.node(NodeId("G_4")).text == "LLM Model (OpenAI)");
  CHECK(out.node(NodeId("G_4")).origin == NodeOrigin::model_added);
  CHECK_FALSE(out.node(NodeId("G_4")).bbox.has_value());
}

TEST_CASE("removes delete nodes and their incident edges") {
  DiagramGraph draft = three_node_draft();
  draft.add_edge(NodeId("G_1"), NodeId("G_3"));
  draft.add_edge(NodeId("G_2"), NodeId("G_3"));
  RefinementDelta delta;
  delta.removes.push_back({NodeId("G_3")});
  DiagramGraph out = apply_refinement(draft, delta);
  CHECK(out.nodes().size() == 2);
  CHECK(out.edges().empty());
}

TEST_CASE("a remove_id consumed by an earlier merge is rejected before any mutation") {
  DiagramGraph draft = three_node_draft();
  RefinementDelta delta;
  delta.merges.push_back({NodeId("G_1"), NodeId("G_2")});
  delta.merges.push_back({NodeId("G_3"), NodeId("G_2")});
  CHECK_THROWS_AS(apply_refinement(draft, delta), ValidationError);

  RefinementDelta dangling;
  dangling.removes.push_back({NodeId("G_9")});
  CHECK_THROWS_AS(apply_refinement(draft, dangling), ValidationError);
}

// --- mock transport --------------------------------------------------------------

TEST_CASE("mock transport replays recorded fixtures keyed by prompt hash") {
  auto dir = std::filesystem::temp_directory_path() / "diagalign-mock-test";
  std::filesystem::remove_all(dir);
  MockTransport mock(dir);
  Prompt prompt = prompts::layout_caption(kImage, "image/png");
  mock.record(prompt, "recorded reply");
  CHECK(mock.complete(prompt) == "recorded reply");

  Prompt other = prompts::layout_caption({1, 2, 3}, "image/png");
  CHECK_THROWS_AS(mock.complete(other), ProtocolError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("prompt hash is sensitive to text and attachment content") {
  Prompt a = prompts::layout_caption(kImage, "image/png");
  Prompt b = prompts::layout_caption({9, 9}, "image/png");
  CHECK(prompt_hash(a) != prompt_hash(b));
  CHECK(prompt_hash(a) == prompt_hash(prompts::layout_caption(kImage, "image/png")));
}

// --- prompt fidelity --------------------------------------------------------------
// Golden copies of the four protocol texts, maintained independently of
// prompts.hpp. Placeholders substituted with known values; any drift in the
// assembled prompt text fails the byte comparison.

TEST_CASE("layout caption prompt text is frozen") {
  Prompt p = prompts::layout_caption(kImage, "application/pdf");
  CHECK(p.joined_text() == golden::layout_caption_text());
  REQUIRE(p.parts.size() == 4);
  CHECK(p.parts[3].kind == PromptPart::Kind::attachment);
  CHECK(p.parts[3].mime_type == "application/pdf");
}

TEST_CASE("diagram generation prompt text is frozen, with and without layout") {
  SECTION("without layout caption: rule 11 absent, layout section empty") {
    Prompt p = prompts::diagram_generation("CTX", "CAP", std::nullopt);
    CHECK(p.joined_text() == golden::diagram_generation_text(false));
  }
  SECTION("with layout caption: rule 11 present, layout section filled") {
    Prompt p = prompts::diagram_generation("CTX", "CAP", "LAYOUT");
    CHECK(p.joined_text() == golden::diagram_generation_text(true));
  }
}

TEST_CASE("node refinement prompt text is frozen") {
  DiagramGraph draft;
  draft.add_node({NodeId("G_1"), "Hello", NodeOrigin::parsed, {}});
  draft.add_node({NodeId("G_2"), "World", NodeOrigin::parsed, {}});
  Prompt p = prompts::node_refinement("flow chart", element_list_string(draft), kImage);
  CHECK(p.joined_text() == golden::node_refinement_text());
  // image attachment sits between the image header and the element-list header
  REQUIRE(p.parts.size() > 4);
  CHECK(p.parts[3].kind == PromptPart::Kind::attachment);
}

TEST_CASE("edge extraction prompt text is frozen") {
  DiagramGraph nodes;
  nodes.add_node({NodeId("G_1"), "Input", NodeOrigin::parsed, {}});
  Prompt p = prompts::edge_extraction("generated", element_list_string(nodes), kImage);
  CHECK(p.joined_text() == golden::edge_extraction_text());
  CHECK(p.parts[p.parts.size() - 2].kind == PromptPart::Kind::attachment);
}
