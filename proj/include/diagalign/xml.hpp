#pragma once

// Minimal non-validating XML tree parser, sufficient for SVG documents:
// elements, attributes, character data, comments, CDATA, processing
// instructions, DOCTYPE skipping, and the predefined + numeric entities.
// Namespace prefixes are kept in the raw name; local_name() strips them.

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "diagalign/errors.hpp"

namespace diagalign::xml {

struct Element {
  std::string name;                          // as written, possibly "prefix:local"
  std::map<std::string, std::string> attrs;  // decoded attribute values
  std::vector<std::unique_ptr<Element>> children;
  std::string text;  // concatenated direct character data
  std::size_t byte_offset = 0;

  std::string local_name() const {
    auto pos = name.rfind(':');
    return pos == std::string::npos ? name : name.substr(pos + 1);
  }

  const std::string* attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }
};

namespace detail {

class Parser {
public:
  explicit Parser(std::string_view input) : in_(input) {}

  std::unique_ptr<Element> parse_document() {
    skip_misc();
    if (pos_ >= in_.size() || in_[pos_] != '<')
      fail("expected root element");
    auto root = parse_element();
    skip_misc();
    if (pos_ < in_.size()) fail("trailing content after root element");
    return root;
  }

private:
  std::string_view in_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw SvgParseError(msg, pos_); }

  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void skip_ws() {
    while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
  }

  // Whitespace, comments, PIs, and DOCTYPE between markup.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--")) {
        auto end = in_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) fail("unterminated comment");
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        auto end = in_.find("?>", pos_ + 2);
        if (end == std::string_view::npos) fail("unterminated processing instruction");
        pos_ = end + 2;
      } else if (starts_with("<!DOCTYPE")) {
        skip_doctype();
      } else {
        return;
      }
    }
  }

  void skip_doctype() {
    // Balance '<' and '>' so internal subsets survive.
    int depth = 0;
    while (pos_ < in_.size()) {
      char c = in_[pos_++];
      if (c == '<') ++depth;
      else if (c == '>' && --depth == 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' ||
           c == '.';
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (pos_ < in_.size() && is_name_char(in_[pos_])) ++pos_;
    if (pos_ == start) fail("expected name");
    return std::string(in_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out += raw[i++];
        continue;
      }
      auto semi = raw.find(';', i + 1);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (!ent.empty() && ent[0] == '#') append_codepoint(out, ent.substr(1));
      else fail("unknown entity: &" + std::string(ent) + ";");
      i = semi + 1;
    }
    return out;
  }

  void append_codepoint(std::string& out, std::string_view digits) {
    unsigned long cp = 0;
    if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X'))
      cp = std::stoul(std::string(digits.substr(1)), nullptr, 16);
    else if (!digits.empty())
      cp = std::stoul(std::string(digits), nullptr, 10);
    else
      fail("empty character reference");
    // UTF-8 encode
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::unique_ptr<Element> parse_element() {
    auto elem = std::make_unique<Element>();
    elem->byte_offset = pos_;
    if (in_[pos_] != '<') fail("expected '<'");
    ++pos_;
    elem->name = parse_name();
    // attributes
    for (;;) {
      skip_ws();
      if (pos_ >= in_.size()) fail("unterminated start tag");
      if (in_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (starts_with("/>")) {
        pos_ += 2;
        return elem;
      }
      std::string key = parse_name();
      skip_ws();
      if (pos_ >= in_.size() || in_[pos_] != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\''))
        fail("expected quoted attribute value");
      char quote = in_[pos_++];
      auto end = in_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      elem->attrs[key] = decode_entities(in_.substr(pos_, end - pos_));
      pos_ = end + 1;
    }
    parse_content(*elem);
    return elem;
  }

  void parse_content(Element& elem) {
    for (;;) {
      if (pos_ >= in_.size()) fail("unterminated element <" + elem.name + ">");
      if (in_[pos_] == '<') {
        if (starts_with("</")) {
          pos_ += 2;
          std::string closing = parse_name();
          if (closing != elem.name)
            fail("mismatched closing tag </" + closing + "> for <" + elem.name + ">");
          skip_ws();
          if (pos_ >= in_.size() || in_[pos_] != '>') fail("expected '>' in closing tag");
          ++pos_;
          return;
        }
        if (starts_with("<!--")) {
          auto end = in_.find("-->", pos_ + 4);
          if (end == std::string_view::npos) fail("unterminated comment");
          pos_ = end + 3;
        } else if (starts_with("<![CDATA[")) {
          auto end = in_.find("]]>", pos_ + 9);
          if (end == std::string_view::npos) fail("unterminated CDATA section");
          elem.text.append(in_.substr(pos_ + 9, end - pos_ - 9));
          pos_ = end + 3;
        } else if (starts_with("<?")) {
          auto end = in_.find("?>", pos_ + 2);
          if (end == std::string_view::npos) fail("unterminated processing instruction");
          pos_ = end + 2;
        } else {
          elem.children.push_back(parse_element());
        }
      } else {
        auto next = in_.find('<', pos_);
        if (next == std::string_view::npos) fail("unterminated element <" + elem.name + ">");
        elem.text += decode_entities(in_.substr(pos_, next - pos_));
        pos_ = next;
      }
    }
  }
};

}  // namespace detail

inline std::unique_ptr<Element> parse(std::string_view input) {
  return detail::Parser(input).parse_document();
}

}  // namespace diagalign::xml
