#pragma once

// Chat-completion-style HTTP adapter: text parts become one text content
// block each, attachments become base64 data URLs. The API key is read from
// the configured environment variable at call time and never persisted.

#include <cstdlib>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "diagalign/errors.hpp"
#include "diagalign/model_client.hpp"
#include "diagalign/prompts.hpp"

namespace diagalign {

namespace detail {

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < data.size()) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < data.size()) chunk |= data[i + 2];
    out += alphabet[(chunk >> 18) & 0x3F];
    out += alphabet[(chunk >> 12) & 0x3F];
    out += i + 1 < data.size() ? alphabet[(chunk >> 6) & 0x3F] : '=';
    out += i + 2 < data.size() ? alphabet[chunk & 0x3F] : '=';
  }
  return out;
}

}  // namespace detail

class HttpTransport : public ModelTransport {
public:
  explicit HttpTransport(ModelEndpointConfig config) : config_(std::move(config)) {}

  std::string complete(const Prompt& prompt) override {
    nlohmann::json content = nlohmann::json::array();
    for (const PromptPart& part : prompt.parts) {
      if (part.kind == PromptPart::Kind::text) {
        content.push_back({{"type", "text"}, {"text", part.text}});
      } else {
        std::string url =
            "data:" + part.mime_type + ";base64," + detail::base64_encode(part.data);
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
      }
    }
    nlohmann::json body{
        {"model", config_.model_name},
        {"temperature", config_.temperature},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})}};

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout);
    client.set_connection_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key_env_var.empty()) {
      const char* key = std::getenv(config_.api_key_env_var.c_str());
      if (!key)
        throw InputError("environment variable " + config_.api_key_env_var + " is not set");
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto res = client.Post("/chat/completions", headers, body.dump(), "application/json");
    if (!res)
      throw ProtocolError("endpoint unreachable: " + httplib::to_string(res.error()), "");
    if (res->status < 200 || res->status >= 300)
      throw ProtocolError("endpoint returned HTTP " + std::to_string(res->status), res->body);
    try {
      nlohmann::json doc = nlohmann::json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("unexpected completion payload: ") + e.what(), res->body);
    }
  }

private:
  ModelEndpointConfig config_;
};

}  // namespace diagalign
