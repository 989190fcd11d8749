#pragma once

// Golden copies of the four protocol prompt texts, maintained independently
// of prompts.hpp and compared byte-for-byte against the assembled prompts.
// Placeholder values are fixed: see each function's comment.

#include <optional>
#include <string>

namespace golden {

// layout_caption: no placeholders.
inline std::string layout_caption_text() {
  return
      "Describe the spatial layout of the components in this document, focusing on their relative positions and connections.\n"
      "For example: 'Component A is above Component B, and an arrow connects B to C which is to the right of A'.\n"
      "Do not interpret the meaning of the diagram, only its visual structure and element arrangement. Be concise.";
}

// diagram_generation with context "CTX", caption "CAP", and optionally
// layout caption "LAYOUT".
inline std::string diagram_generation_text(bool with_layout) {
  std::string head =
      "\n<INSTRUCTION>\n"
      "\n"
      "Generate an SVG diagram based on the following information.\n"
      "\n"
      "**Rules:**\n"
      "1.  Create clean, well-structured SVG code. Keep the diagram width=\"1000\" height=\"700\".\n"
      "2.  Use main concepts and expressions given in the original paper context for element text (very important).\n"
      "3.  Ensure elements (shapes, text) do not overlap.\n"
      "4.  Do **not** include any legends.\n"
      "5.  Arrows must start and end precisely on the border of the elements they connect. Arrows should avoid crossing other elements by using vertical and horizontal corner arrows. Do not use any sloping arrows.\n"
      "6.  Represent the core mechanisms described in the context. Avoid using a single large block for a complex mechanism that should be broken down. But also keep the mechanism representation intuitive and easy-to-understand enough.\n"
      "7.  **Never** use any characters leading to SVG rendering issues, for example, & (Ampersand).\n"
      "8.  Keep proper layout tightness. Don't leave a lot meaningless blank space between elements.\n"
      "9.  Add font-size independently to every single text element.\n"
      "10. Avoid generating problematic svg code, for example, svg code with invalid xml characters or duplicate attributes.\n";
  std::string tail =
      "\n"
      "\n"
      "Please output *only* the SVG code block, starting with `<svg` and ending with `</svg>`.\n"
      "\n"
      "<END OF INSTRUCTION>\n"
      "\n"
      "**Paper Context:**\n"
      "CTX\n"
      "\n"
      "**Diagram Caption/Focus:**\n"
      "CAP\n";
  if (!with_layout) return head + tail + "\n\nNow, output the SVG code block:\n";
  return head + "11.  Adhere strictly to the spatial layout in the layout and element text." + tail +
         "**Spatial Layout:**\nLAYOUT\n\nNow, output the SVG code block:\n";
}

// node_refinement with diagram type "flow chart" and a two-element list
// (G_1 "Hello", G_2 "World").
inline std::string node_refinement_text() {
  return
      "You are an expert diagram analysis assistant specializing in text element coherence.\n"
      "The following image is a 'flow chart'. I have already performed an initial text extraction from its source, resulting in the list of text elements below.\n"
      "\n**Image of the diagram:**\n"
      "\n\n**Currently Extracted Textual Elements (- Element [ID]: \"[TEXT]\"):**\n"
      "- Element G_1: \"Hello\"\n- Element G_2: \"World\"\n"
      "\n\n**Your Task:**\n"
      "Analyze the image and the provided list of elements. Your goal is to improve the element list by identifying necessary merges, additions, or removals.\n"
      "\n1. **Merges**: Identify if any listed elements are parts of a single, continuous text block in the image and should be merged.\n"
      "   For example, if 'Element ID_A: Hello' and 'Element ID_B: World' visually form 'Hello World', they should be merged.\n"
      "\n2. **Additions**: Identify two specific types of missing nodes:\n"
      "   a) Duplicate nodes: Nodes that have the same text as existing nodes but represent different instances in the diagram.\n"
      "      For example, if there are two 'mask' nodes in the diagram but only one is in the current list.\n"
      "   b) Non-text nodes: Nodes that use icons or images instead of text to represent concepts.\n"
      "      For example, an OpenAI logo representing LLMs, or a neural network icon representing a model.\n"
      "      For these nodes, generate appropriate text descriptions based on their visual representation.\n"
      "\n3. **Removals**: Identify nodes that should be removed based on the following strict policies:\n"
      "   a) Non-English/Non-Math Text: Remove nodes that contain **ONLY** non-English and non-mathematical characters.\n"
      "      For example, if a node contains **only** Chinese characters, it should be removed.\n"
      "      However, if the node contains a mix of English and non-English text, keep it.\n"
      "   b) Numbers Only: Remove nodes that contain **ONLY** numbers (including decimal points and basic math symbols).\n"
      "      For example, '123', '3.14', or '1+2' should be removed.\n"
      "   c) Non-conceptual elements: Remove nodes not representing concepts in the diagram, such as text explanation, description, or examples.\n**Important Notes:**\n"
      "- Do not consider general diagram elements (like arrows, lines, or decorative elements) as nodes to be added.\n"
      "- For duplicate nodes, ensure they are truly separate instances in the diagram.\n"
      "- For non-text nodes, generate clear and concise descriptions that capture their meaning.\n"
      "- For removals, strictly follow the three policies above. **Do not remove nodes for any other reasons.** \n"
      "\n**Output Format:**\n"
      "First, provide your analysis in a 'Thinking Phase' section, explaining your observations and reasoning.\n"
      "Then, after the signal 'FINAL ANSWER:', provide your findings as a JSON object with three optional keys: 'merges', 'adds', and 'removes'.\n"
      "- 'merges': A list of objects, where each object has 'keep_id' (the ID of the element to retain and append to) and 'remove_id' (the ID of the element whose text will be appended and then the element removed).\n"
      "- 'adds': A list of objects, where each object has a 'text' key for the newly identified text string.\n"
      "- 'removes': A list of objects, where each object has a 'id' key for the element ID to be removed.\n"
      "Example JSON output: {\"merges\": [{\"keep_id\": \"G_1\", \"remove_id\": \"G_2\"}], \"adds\": [{\"text\": \"LLM Model (OpenAI)\"}, {\"text\": \"Input Image\"}], \"removes\": [{\"id\": \"G_3\"}, {\"id\": \"G_4\"}]}.\n"
      "If no operations are needed, provide an empty JSON object {} or omit keys.\n"
      "Only include IDs from the provided list for merging and removing. Ensure 'keep_id' and 'remove_id' are different.\n"
      "\n**Response Structure:**\n"
      "1. Start with 'THINKING PHASE:' and provide your detailed analysis\n"
      "2. After your analysis, write 'FINAL ANSWER:' on a new line\n"
      "3. Then provide the JSON output";
}

// edge_extraction with diagram type "generated" and a one-element list
// (G_1 "Input"). The "{diagram_type}" braces in two header lines are part
// of the frozen text, not placeholders.
inline std::string edge_extraction_text() {
  return
      "You are an expert diagram analysis assistant.\n"
      "The following image is a diagram (generated). I have already extracted the text elements from it.\n"
      "\n\n**Identified Textual Elements in the {diagram_type} Diagram (- Element [ID]: \"[TEXT]\"):**\n"
      "- Element G_1: \"Input\"\n"
      "\n\n**Task:**\n"
      "Analyze **all** connections (e.g., arrows, lines indicating flow) in the generated Diagram image.\n"
      "Identify **all** DIRECTED one-to-one connections BETWEEN the provided element IDs.\n"
      "Every element should involve in at least one connection.All straight or corner arrows indicate connections\n"
      "First, think step-by-step about the connections. Then, on a new line, provide the final list of connections.\n"
      "Output your findings as a JSON list of lists, where each inner list is a pair of element IDs representing a directed connection from the first ID to the second ID.\n"
      "For example: [[\"ID1\", \"ID2\"], [\"ID1\", \"ID3\"], [\"ID4\", \"ID2\"]].\n"
      "Only include **IDs** (not the text) from the list provided above. Ensure the source and target IDs are correct based on the diagram's flow.\n"
      "If there are no connections, return an empty list [].\n"
      "Start your final JSON output with the signal 'Final Answer JSON:'.\n"
      "\n\n**{diagram_type} Diagram Image:**\n"
      "\n\n**Thinking Process and JSON Output of Connections:**";
}

}  // namespace golden
