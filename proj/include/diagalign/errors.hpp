#pragma once

#include <stdexcept>
#include <string>

namespace diagalign {

// Base for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Graph construction / deserialization failures.
class GraphError : public Error {
public:
  enum class Kind { malformed_document, duplicate_node, dangling_endpoint, unknown_node };

  GraphError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

// XML / SVG input failures, with the byte offset where parsing stopped.
class SvgParseError : public Error {
public:
  SvgParseError(const std::string& msg, std::size_t byte_offset)
      : Error(msg + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

private:
  std::size_t byte_offset_;
};

// Input parsed as XML but is not an SVG document.
class WrongDocumentError : public Error {
public:
  using Error::Error;
};

// Model endpoint failed after all retries, or replied with something
// that cannot be decoded. Carries the last raw reply for audit.
class ProtocolError : public Error {
public:
  ProtocolError(const std::string& msg, std::string raw_reply)
      : Error(msg), raw_reply_(std::move(raw_reply)) {}
  const std::string& raw_reply() const { return raw_reply_; }

private:
  std::string raw_reply_;
};

// Model reply contained no SVG block.
class GenerationError : public ProtocolError {
public:
  using ProtocolError::ProtocolError;
};

// Refinement delta references ids that do not exist in the draft.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Per-item pipeline failure, labeled with the stage that failed
// ("parse", "cluster", "render", "refine", "edges").
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& msg)
      : Error("[" + stage + "] " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

// Corpus manifest / config / CLI input failures.
class InputError : public Error {
public:
  using Error::Error;
};

}  // namespace diagalign
