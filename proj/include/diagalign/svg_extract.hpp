#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diagalign/errors.hpp"
#include "diagalign/graph.hpp"
#include "diagalign/xml.hpp"

namespace diagalign {

// One positioned text fragment read from an SVG file. x is the left edge of
// the span, y the baseline, both in SVG user units.
struct TextItem {
  double x = 0;
  double y = 0;
  double span_width = 0;
  double font_size = 0;
  std::string content;
  bool width_estimated = false;

  bool operator==(const TextItem&) const = default;
};

struct ExtractionConfig {
  double k_y = 1.5;           // vertical proximity multiplier
  double tau_overlap = 0.2;   // minimum x-span overlap fraction
  double default_font_size = 12;
};

// Structured side-channel diagnostics (skipped content, estimated widths,
// ignored transforms). Never interleaved with results.
struct Diagnostic {
  std::string code;     // e.g. "ignored-transform", "estimated-width"
  std::string detail;
};

namespace detail {

inline std::string collapse_ws(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = !out.empty();
    } else {
      if (in_space) out += ' ';
      out += c;
      in_space = false;
    }
  }
  return out;
}

inline std::optional<double> parse_length(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  return v;
}

// First number of a (possibly whitespace/comma separated) coordinate list.
inline std::optional<double> parse_first_number(const std::string& s) { return parse_length(s); }

struct Translate {
  double dx = 0, dy = 0;
};

// Accumulates the translate components of a transform list. Non-translate
// functions (and matrices with a non-identity linear part) are reported.
inline Translate parse_transform(const std::string& spec, std::vector<Diagnostic>& diags) {
  Translate total;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < spec.size() &&
           (std::isspace(static_cast<unsigned char>(spec[i])) || spec[i] == ','))
      ++i;
  };
  while (true) {
    skip();
    if (i >= spec.size()) break;
    std::size_t name_start = i;
    while (i < spec.size() && (std::isalpha(static_cast<unsigned char>(spec[i])))) ++i;
    std::string fn = spec.substr(name_start, i - name_start);
    skip();
    if (i >= spec.size() || spec[i] != '(') break;
    std::size_t close = spec.find(')', i);
    if (close == std::string::npos) break;
    std::string args_str = spec.substr(i + 1, close - i - 1);
    i = close + 1;
    std::vector<double> args;
    std::size_t p = 0;
    while (p < args_str.size()) {
      while (p < args_str.size() &&
             (std::isspace(static_cast<unsigned char>(args_str[p])) || args_str[p] == ','))
        ++p;
      if (p >= args_str.size()) break;
      char* end = nullptr;
      double v = std::strtod(args_str.c_str() + p, &end);
      if (end == args_str.c_str() + p) break;
      args.push_back(v);
      p = static_cast<std::size_t>(end - args_str.c_str());
    }
    if (fn == "translate") {
      if (!args.empty()) {
        total.dx += args[0];
        total.dy += args.size() > 1 ? args[1] : 0;
      }
    } else if (fn == "matrix" && args.size() == 6 && args[0] == 1 && args[1] == 0 &&
               args[2] == 0 && args[3] == 1) {
      total.dx += args[4];
      total.dy += args[5];
    } else {
      diags.push_back({"ignored-transform", fn + "(" + args_str + ")"});
    }
  }
  return total;
}

// "font-size: 10px" inside a style attribute.
inline std::optional<double> font_size_from_style(const std::string& style) {
  std::size_t pos = 0;
  while ((pos = style.find("font-size", pos)) != std::string::npos) {
    std::size_t colon = style.find(':', pos);
    if (colon == std::string::npos) return std::nullopt;
    auto v = parse_length(style.substr(colon + 1));
    if (v) return v;
    pos = colon;
  }
  return std::nullopt;
}

struct WalkState {
  double tx = 0, ty = 0;             // accumulated translate
  std::optional<double> font_size;   // nearest explicit size
  double cur_x = 0, cur_y = 0;       // current text position (for tspans)
};

class TextWalker {
public:
  TextWalker(const ExtractionConfig& config, std::vector<TextItem>& items,
             std::vector<Diagnostic>& diags)
      : config_(config), items_(items), diags_(diags) {}

  void walk(const xml::Element& elem, WalkState state) {
    std::string name = elem.local_name();
    if (name == "defs" || name == "clipPath") {
      if (has_text_below(elem))
        diags_.push_back({"skipped-unrendered", "text inside <" + name + "> ignored"});
      return;
    }
    if (const std::string* t = elem.attr("transform")) {
      Translate tr = parse_transform(*t, diags_);
      state.tx += tr.dx;
      state.ty += tr.dy;
    }
    if (const std::string* fs = elem.attr("font-size")) {
      if (auto v = parse_length(*fs)) state.font_size = v;
    }
    if (const std::string* style = elem.attr("style")) {
      if (auto v = font_size_from_style(*style)) state.font_size = v;
    }
    if (elem.attr("writing-mode") != nullptr)
      diags_.push_back({"vertical-text", "writing-mode attribute present; vertical layout untested"});

    if (name == "text" || name == "tspan") {
      if (const std::string* x = elem.attr("x")) {
        if (auto v = parse_first_number(*x)) state.cur_x = *v;
      }
      if (const std::string* y = elem.attr("y")) {
        if (auto v = parse_first_number(*y)) state.cur_y = *v;
      }
      emit_item(elem, state);
      for (const auto& child : elem.children) walk(*child, state);
    } else {
      for (const auto& child : elem.children) walk(*child, state);
    }
  }

private:
  const ExtractionConfig& config_;
  std::vector<TextItem>& items_;
  std::vector<Diagnostic>& diags_;

  static bool has_text_below(const xml::Element& elem) {
    if (elem.local_name() == "text") return true;
    return std::ranges::any_of(elem.children,
                               [](const auto& c) { return has_text_below(*c); });
  }

  void emit_item(const xml::Element& elem, const WalkState& state) {
    std::string content = collapse_ws(elem.text);
    if (content.empty()) return;
    TextItem item;
    item.x = state.cur_x + state.tx;
    item.y = state.cur_y + state.ty;
    item.font_size = state.font_size.value_or(config_.default_font_size);
    item.content = content;
    if (const std::string* len = elem.attr("textLength")) {
      if (auto v = parse_length(*len)) item.span_width = std::max(0.0, *v);
    }
    if (item.span_width == 0 && !elem.attr("textLength")) {
      item.span_width = 0.6 * item.font_size * static_cast<double>(content.size());
      item.width_estimated = true;
      diags_.push_back({"estimated-width", "\"" + content + "\""});
    }
    items_.push_back(std::move(item));
  }
};

}  // namespace detail

// Parses SVG bytes into positioned text items. Coordinates are resolved
// through ancestor translate transforms; font size comes from the nearest
// explicit attribute or style, else config.default_font_size.
inline std::vector<TextItem> parse_text_items(std::string_view svg_bytes,
                                              const ExtractionConfig& config,
                                              std::vector<Diagnostic>* diagnostics = nullptr) {
  auto root = xml::parse(svg_bytes);
  if (root->local_name() != "svg")
    throw WrongDocumentError("root element is <" + root->name + ">, not <svg>");
  std::vector<TextItem> items;
  std::vector<Diagnostic> local_diags;
  std::vector<Diagnostic>& diags = diagnostics ? *diagnostics : local_diags;
  detail::TextWalker walker(config, items, diags);
  walker.walk(*root, detail::WalkState{});
  return items;
}

// Pairwise link predicate between two items:
//   1) |y1 - y2| < k_y * max(font_size1, font_size2)
//   2) x-span overlap length / min(span_width1, span_width2) > tau_overlap
inline bool items_linked(const TextItem& a, const TextItem& b, const ExtractionConfig& config) {
  if (std::abs(a.y - b.y) >= config.k_y * std::max(a.font_size, b.font_size)) return false;
  double overlap = std::min(a.x + a.span_width, b.x + b.span_width) - std::max(a.x, b.x);
  double denom = std::min(a.span_width, b.span_width);
  if (denom <= 0) return overlap >= 0;  // zero-width span: point containment
  return overlap / denom > config.tau_overlap;
}

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

inline BBox item_extent(const TextItem& it) {
  return {it.x, it.y - it.font_size, it.x + it.span_width, it.y};
}

// Geometry-only ordering so results are independent of input order.
inline bool item_before(const TextItem& a, const TextItem& b) {
  return std::tie(a.y, a.x, a.content, a.span_width, a.font_size) <
         std::tie(b.y, b.x, b.content, b.span_width, b.font_size);
}

}  // namespace detail

// Clusters items into draft nodes: connected components of the pairwise link
// relation. Node text joins item contents in (y, x) ascending order; node ids
// "G_n" follow the (y, x) order of cluster top-left corners. Edge set empty.
inline DiagramGraph cluster_items(std::vector<TextItem> items, const ExtractionConfig& config) {
  std::sort(items.begin(), items.end(), detail::item_before);

  detail::UnionFind uf(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j)
      if (items_linked(items[i], items[j], config)) uf.unite(i, j);

  struct Cluster {
    std::vector<std::size_t> members;  // already in (y, x) order
    BBox bbox;
  };
  std::map<std::size_t, Cluster> clusters;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Cluster& c = clusters[uf.find(i)];
    BBox ext = detail::item_extent(items[i]);
    c.bbox = c.members.empty() ? ext : c.bbox.united(ext);
    c.members.push_back(i);
  }

  std::vector<Cluster> ordered;
  ordered.reserve(clusters.size());
  for (auto& [_, c] : clusters) ordered.push_back(std::move(c));
  std::sort(ordered.begin(), ordered.end(), [](const Cluster& a, const Cluster& b) {
    return std::tie(a.bbox.y_min, a.bbox.x_min) < std::tie(b.bbox.y_min, b.bbox.x_min);
  });

  DiagramGraph graph;
  std::uint64_t next = 1;
  for (const Cluster& c : ordered) {
    TextNode node;
    node.id = NodeId::indexed(next++);
    node.origin = NodeOrigin::parsed;
    node.bbox = c.bbox;
    for (std::size_t idx : c.members) {
      if (!node.text.empty()) node.text += ' ';
      node.text += items[idx].content;
    }
    graph.add_node(std::move(node));
  }
  return graph;
}

}  // namespace diagalign
