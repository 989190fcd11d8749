#pragma once

// Prompt templates for the four model protocols: layout captioning, diagram
// generation, node refinement, and edge extraction. Template text is frozen;
// only the declared placeholders are substituted. A prompt is an ordered
// sequence of parts, where a part is either text or a binary attachment.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diagalign/graph.hpp"

namespace diagalign {

struct PromptPart {
  enum class Kind { text, attachment };
  Kind kind = Kind::text;
  std::string text;            // when kind == text
  std::vector<std::uint8_t> data;  // when kind == attachment
  std::string mime_type;       // when kind == attachment, e.g. "image/png"

  static PromptPart make_text(std::string t) {
    PromptPart p;
    p.text = std::move(t);
    return p;
  }
  static PromptPart make_attachment(std::vector<std::uint8_t> bytes, std::string mime) {
    PromptPart p;
    p.kind = Kind::attachment;
    p.data = std::move(bytes);
    p.mime_type = std::move(mime);
    return p;
  }
};

struct Prompt {
  std::vector<PromptPart> parts;

  // All text parts joined with newlines; the wire text for text-only
  // transports and the audit form of the prompt.
  std::string joined_text() const {
    std::string out;
    bool first = true;
    for (const PromptPart& p : parts) {
      if (p.kind != PromptPart::Kind::text) continue;
      if (!first) out += '\n';
      out += p.text;
      first = false;
    }
    return out;
  }
};

// "- Element G_1: \"text\"" lines, one per node, in id order.
inline std::string element_list_string(const DiagramGraph& graph) {
  std::string out;
  bool first = true;
  for (const auto& [id, node] : graph.nodes()) {
    if (!first) out += '\n';
    out += "- Element " + id.value + ": \"" + node.text + "\"";
    first = false;
  }
  return out;
}

namespace prompts {

inline Prompt layout_caption(std::vector<std::uint8_t> document, std::string mime_type) {
  Prompt p;
  p.parts = {
      PromptPart::make_text(
          "Describe the spatial layout of the components in this document, focusing on their "
          "relative positions and connections."),
      PromptPart::make_text(
          "For example: 'Component A is above Component B, and an arrow connects B to C which is "
          "to the right of A'."),
      PromptPart::make_text(
          "Do not interpret the meaning of the diagram, only its visual structure and element "
          "arrangement. Be concise."),
      PromptPart::make_attachment(std::move(document), std::move(mime_type)),
  };
  return p;
}

inline Prompt diagram_generation(const std::string& paper_context,
                                 const std::string& diagram_caption,
                                 const std::optional<std::string>& layout_caption) {
  std::string rule_11 =
      layout_caption ? "11.  Adhere strictly to the spatial layout in the layout and element text."
                     : "";
  std::string layout_section =
      layout_caption ? "**Spatial Layout:**\n" + *layout_caption : "";
  std::string text =
      "\n<INSTRUCTION>\n"
      "\n"
      "Generate an SVG diagram based on the following information.\n"
      "\n"
      "**Rules:**\n"
      "1.  Create clean, well-structured SVG code. Keep the diagram width=\"1000\" height=\"700\".\n"
      "2.  Use main concepts and expressions given in the original paper context for element text "
      "(very important).\n"
      "3.  Ensure elements (shapes, text) do not overlap.\n"
      "4.  Do **not** include any legends.\n"
      "5.  Arrows must start and end precisely on the border of the elements they connect. Arrows "
      "should avoid crossing other elements by using vertical and horizontal corner arrows. Do not "
      "use any sloping arrows.\n"
      "6.  Represent the core mechanisms described in the context. Avoid using a single large "
      "block for a complex mechanism that should be broken down. But also keep the mechanism "
      "representation intuitive and easy-to-understand enough.\n"
      "7.  **Never** use any characters leading to SVG rendering issues, for example, & "
      "(Ampersand).\n"
      "8.  Keep proper layout tightness. Don't leave a lot meaningless blank space between "
      "elements.\n"
      "9.  Add font-size independently to every single text element.\n"
      "10. Avoid generating problematic svg code, for example, svg code with invalid xml "
      "characters or duplicate attributes.\n" +
      rule_11 +
      "\n"
      "\n"
      "Please output *only* the SVG code block, starting with `<svg` and ending with `</svg>`.\n"
      "\n"
      "<END OF INSTRUCTION>\n"
      "\n"
      "**Paper Context:**\n" +
      paper_context +
      "\n"
      "\n"
      "**Diagram Caption/Focus:**\n" +
      diagram_caption + "\n" + layout_section +
      "\n"
      "\n"
      "Now, output the SVG code block:\n";
  Prompt p;
  p.parts = {PromptPart::make_text(std::move(text))};
  return p;
}

inline Prompt node_refinement(const std::string& diagram_type_name,
                              const std::string& element_list_str,
                              std::vector<std::uint8_t> image) {
  Prompt p;
  p.parts = {
      PromptPart::make_text(
          "You are an expert diagram analysis assistant specializing in text element coherence."),
      PromptPart::make_text("The following image is a '" + diagram_type_name +
                            "'. I have already performed an initial text extraction from its "
                            "source, resulting in the list of text elements below."),
      PromptPart::make_text("\n**Image of the diagram:**"),
      PromptPart::make_attachment(std::move(image), "image/png"),
      PromptPart::make_text(
          "\n\n**Currently Extracted Textual Elements (- Element [ID]: \"[TEXT]\"):**"),
      PromptPart::make_text(element_list_str),
      PromptPart::make_text("\n\n**Your Task:**"),
      PromptPart::make_text(
          "Analyze the image and the provided list of elements. Your goal is to improve the "
          "element list by identifying necessary merges, additions, or removals."),
      PromptPart::make_text(
          "\n1. **Merges**: Identify if any listed elements are parts of a single, continuous "
          "text block in the image and should be merged."),
      PromptPart::make_text(
          "   For example, if 'Element ID_A: Hello' and 'Element ID_B: World' visually form "
          "'Hello World', they should be merged."),
      PromptPart::make_text(
          "\n2. **Additions**: Identify two specific types of missing nodes:"),
      PromptPart::make_text(
          "   a) Duplicate nodes: Nodes that have the same text as existing nodes but represent "
          "different instances in the diagram."),
      PromptPart::make_text(
          "      For example, if there are two 'mask' nodes in the diagram but only one is in the "
          "current list."),
      PromptPart::make_text(
          "   b) Non-text nodes: Nodes that use icons or images instead of text to represent "
          "concepts."),
      PromptPart::make_text(
          "      For example, an OpenAI logo representing LLMs, or a neural network icon "
          "representing a model."),
      PromptPart::make_text(
          "      For these nodes, generate appropriate text descriptions based on their visual "
          "representation."),
      PromptPart::make_text(
          "\n3. **Removals**: Identify nodes that should be removed based on the following strict "
          "policies:"),
      PromptPart::make_text(
          "   a) Non-English/Non-Math Text: Remove nodes that contain **ONLY** non-English and "
          "non-mathematical characters."),
      PromptPart::make_text(
          "      For example, if a node contains **only** Chinese characters, it should be "
          "removed."),
      PromptPart::make_text(
          "      However, if the node contains a mix of English and non-English text, keep it."),
      PromptPart::make_text(
          "   b) Numbers Only: Remove nodes that contain **ONLY** numbers (including decimal "
          "points and basic math symbols)."),
      PromptPart::make_text(
          "      For example, '123', '3.14', or '1+2' should be removed."),
      PromptPart::make_text(
          "   c) Non-conceptual elements: Remove nodes not representing concepts in the diagram, "
          "such as text explanation, description, or examples.\n**Important Notes:**"),
      PromptPart::make_text(
          "- Do not consider general diagram elements (like arrows, lines, or decorative "
          "elements) as nodes to be added."),
      PromptPart::make_text(
          "- For duplicate nodes, ensure they are truly separate instances in the diagram."),
      PromptPart::make_text(
          "- For non-text nodes, generate clear and concise descriptions that capture their "
          "meaning."),
      PromptPart::make_text(
          "- For removals, strictly follow the three policies above. **Do not remove nodes for "
          "any other reasons.** "),
      PromptPart::make_text("\n**Output Format:**"),
      PromptPart::make_text(
          "First, provide your analysis in a 'Thinking Phase' section, explaining your "
          "observations and reasoning."),
      PromptPart::make_text(
          "Then, after the signal 'FINAL ANSWER:', provide your findings as a JSON object with "
          "three optional keys: 'merges', 'adds', and 'removes'."),
      PromptPart::make_text(
          "- 'merges': A list of objects, where each object has 'keep_id' (the ID of the element "
          "to retain and append to) and 'remove_id' (the ID of the element whose text will be "
          "appended and then the element removed)."),
      PromptPart::make_text(
          "- 'adds': A list of objects, where each object has a 'text' key for the newly "
          "identified text string."),
      PromptPart::make_text(
          "- 'removes': A list of objects, where each object has a 'id' key for the element ID "
          "to be removed."),
      PromptPart::make_text(
          "Example JSON output: {\"merges\": [{\"keep_id\": \"G_1\", \"remove_id\": \"G_2\"}], "
          "\"adds\": [{\"text\": \"LLM Model (OpenAI)\"}, {\"text\": \"Input Image\"}], "
          "\"removes\": [{\"id\": \"G_3\"}, {\"id\": \"G_4\"}]}."),
      PromptPart::make_text(
          "If no operations are needed, provide an empty JSON object {} or omit keys."),
      PromptPart::make_text(
          "Only include IDs from the provided list for merging and removing. Ensure 'keep_id' "
          "and 'remove_id' are different."),
      PromptPart::make_text("\n**Response Structure:**"),
      PromptPart::make_text(
          "1. Start with 'THINKING PHASE:' and provide your detailed analysis"),
      PromptPart::make_text("2. After your analysis, write 'FINAL ANSWER:' on a new line"),
      PromptPart::make_text("3. Then provide the JSON output"),
  };
  return p;
}

inline Prompt edge_extraction(const std::string& diagram_type,
                              const std::string& element_list_str,
                              std::vector<std::uint8_t> image) {
  Prompt p;
  p.parts = {
      PromptPart::make_text("You are an expert diagram analysis assistant."),
      PromptPart::make_text("The following image is a diagram (" + diagram_type +
                            "). I have already extracted the text elements from it."),
      // "{diagram_type}" stays literal in the two header lines below; only
      // the sentence parts above and the Task line substitute it.
      PromptPart::make_text(
          "\n\n**Identified Textual Elements in the {diagram_type} Diagram (- Element [ID]: "
          "\"[TEXT]\"):**"),
      PromptPart::make_text(element_list_str),
      PromptPart::make_text("\n\n**Task:**"),
      PromptPart::make_text("Analyze **all** connections (e.g., arrows, lines indicating flow) in "
                            "the " +
                            diagram_type + " Diagram image."),
      PromptPart::make_text(
          "Identify **all** DIRECTED one-to-one connections BETWEEN the provided element IDs."),
      PromptPart::make_text("Every element should involve in at least one connection.All straight "
                            "or corner arrows indicate connections"),
      PromptPart::make_text(
          "First, think step-by-step about the connections. Then, on a new line, provide the "
          "final list of connections."),
      PromptPart::make_text(
          "Output your findings as a JSON list of lists, where each inner list is a pair of "
          "element IDs representing a directed connection from the first ID to the second ID."),
      PromptPart::make_text(
          "For example: [[\"ID1\", \"ID2\"], [\"ID1\", \"ID3\"], [\"ID4\", \"ID2\"]]."),
      PromptPart::make_text(
          "Only include **IDs** (not the text) from the list provided above. Ensure the source "
          "and target IDs are correct based on the diagram's flow."),
      PromptPart::make_text("If there are no connections, return an empty list []."),
      PromptPart::make_text(
          "Start your final JSON output with the signal 'Final Answer JSON:'."),
      PromptPart::make_text("\n\n**{diagram_type} Diagram Image:**"),
      PromptPart::make_attachment(std::move(image), "image/png"),
      PromptPart::make_text("\n\n**Thinking Process and JSON Output of Connections:**"),
  };
  return p;
}

}  // namespace prompts
}  // namespace diagalign
