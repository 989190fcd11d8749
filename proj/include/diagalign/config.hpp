#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "diagalign/errors.hpp"
#include "diagalign/harness.hpp"
#include "diagalign/model_client.hpp"

namespace diagalign {

// All tunables in one place; loadable from a JSON config file.
struct ToolConfig {
  PipelineConfig pipeline;
  ModelEndpointConfig endpoint;
  BatchOptions batch;
};

inline ToolConfig config_from_json(const nlohmann::json& doc) {
  ToolConfig cfg;
  cfg.pipeline.extraction.k_y = doc.value("k_y", cfg.pipeline.extraction.k_y);
  cfg.pipeline.extraction.tau_overlap =
      doc.value("tau_overlap", cfg.pipeline.extraction.tau_overlap);
  cfg.pipeline.extraction.default_font_size =
      doc.value("default_font_size", cfg.pipeline.extraction.default_font_size);
  cfg.pipeline.match.similarity_threshold =
      doc.value("similarity_threshold", cfg.pipeline.match.similarity_threshold);
  std::string mode = doc.value("path_mode", "full_graph");
  if (mode == "full_graph")
    cfg.pipeline.match.path_mode = PathMode::full_graph;
  else if (mode == "induced")
    cfg.pipeline.match.path_mode = PathMode::induced;
  else
    throw InputError("unknown path_mode: " + mode);
  cfg.pipeline.renderer_cmd = doc.value("renderer", "");
  if (doc.contains("work_dir")) cfg.pipeline.work_dir = doc.at("work_dir").get<std::string>();

  cfg.endpoint.base_url = doc.value("base_url", "");
  cfg.endpoint.model_name = doc.value("model_name", "");
  cfg.endpoint.api_key_env_var = doc.value("api_key_env_var", "");
  cfg.endpoint.max_retries = doc.value("max_retries", cfg.endpoint.max_retries);
  cfg.endpoint.temperature = doc.value("temperature", cfg.endpoint.temperature);
  if (doc.contains("timeout_seconds"))
    cfg.endpoint.timeout = std::chrono::seconds(doc.at("timeout_seconds").get<long>());

  cfg.batch.parallelism = doc.value("parallelism", cfg.batch.parallelism);
  cfg.batch.failure_rate_abort_threshold =
      doc.value("failure_rate_abort_threshold", cfg.batch.failure_rate_abort_threshold);
  cfg.batch.exclude_degenerate_from_means =
      doc.value("exclude_degenerate", cfg.batch.exclude_degenerate_from_means);
  return cfg;
}

inline ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace diagalign
