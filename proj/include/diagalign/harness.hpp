#pragma once

#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "diagalign/alignment.hpp"
#include "diagalign/errors.hpp"
#include "diagalign/graph.hpp"
#include "diagalign/model_client.hpp"
#include "diagalign/stats.hpp"
#include "diagalign/svg_extract.hpp"

namespace diagalign {

// One evaluation item of a local corpus.
struct CorpusRecord {
  std::string item_id;
  std::string paper_context;
  std::string original_caption;
  std::optional<std::string> layout_caption;
  std::string reference_svg_path;
  std::map<std::string, std::string> generated_svg_paths;  // model label -> path
};

struct SkippedItem {
  std::string item_id;
  std::string reason;
};

struct CorpusLoadResult {
  std::vector<CorpusRecord> records;
  std::vector<SkippedItem> skipped;
};

// Manifest is JSON Lines, one record per line. A malformed line aborts the
// load; a missing referenced file only skips that item.
inline CorpusLoadResult load_corpus(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw InputError("cannot open manifest: " + manifest_path.string());
  CorpusLoadResult result;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    CorpusRecord rec;
    try {
      rec.item_id = doc.at("item_id").get<std::string>();
      rec.paper_context = doc.value("paper_context", "");
      rec.original_caption = doc.value("original_caption", "");
      if (doc.contains("layout_caption") && !doc.at("layout_caption").is_null())
        rec.layout_caption = doc.at("layout_caption").get<std::string>();
      rec.reference_svg_path = doc.at("reference_svg_path").get<std::string>();
      const nlohmann::json gen_paths =
          doc.value("generated_svg_paths", nlohmann::json::object());
      for (const auto& [label, path] : gen_paths.items())
        rec.generated_svg_paths[label] = path.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_ids.insert(rec.item_id).second)
      throw InputError("manifest line " + std::to_string(line_no) + ": duplicate item_id " +
                       rec.item_id);

    std::string missing;
    if (!std::filesystem::exists(rec.reference_svg_path)) missing = rec.reference_svg_path;
    for (const auto& [_, path] : rec.generated_svg_paths)
      if (missing.empty() && !std::filesystem::exists(path)) missing = path;
    if (!missing.empty()) {
      result.skipped.push_back({rec.item_id, "missing file: " + missing});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

// --- Rendering --------------------------------------------------------------

// Invokes the configured external rasterizer as `<renderer> <in.svg> <out.png>`.
inline void render_svg(const std::string& renderer_cmd, const std::filesystem::path& svg_path,
                       const std::filesystem::path& png_path) {
  if (renderer_cmd.empty()) throw StageError("render", "no renderer command configured");
  std::string cmd =
      renderer_cmd + " \"" + svg_path.string() + "\" \"" + png_path.string() + "\" 2>/dev/null";
  int rc = std::system(cmd.c_str());
  if (rc != 0)
    throw StageError("render", "renderer command failed (exit " + std::to_string(rc) +
                                   "): " + renderer_cmd);
  if (!std::filesystem::exists(png_path))
    throw StageError("render", "renderer produced no output: " + png_path.string());
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- Per-item pipeline ------------------------------------------------------

struct PipelineConfig {
  ExtractionConfig extraction;
  MatchConfig match;
  std::string renderer_cmd;  // "<renderer> <in.svg> <out.png>"
  std::filesystem::path work_dir = std::filesystem::temp_directory_path();
};

// Full extraction pipeline for one SVG: parse text items, cluster into a
// draft, render, model refinement, model edge extraction. When `audit_dir`
// is given, the draft graph and refinement delta are persisted next to the
// final graph.
inline DiagramGraph extract_graph(const std::filesystem::path& svg_path, Provenance provenance,
                                  const PipelineConfig& config, ModelClient& client,
                                  const std::optional<std::filesystem::path>& audit_dir = {},
                                  std::vector<Diagnostic>* diagnostics = nullptr) {
  std::vector<std::uint8_t> svg_bytes = read_file_bytes(svg_path);

  DiagramGraph draft;
  try {
    auto items = parse_text_items(
        std::string_view(reinterpret_cast<const char*>(svg_bytes.data()), svg_bytes.size()),
        config.extraction, diagnostics);
    draft = cluster_items(std::move(items), config.extraction);
  } catch (const Error& e) {
    throw StageError("parse", e.what());
  }
  draft.provenance = provenance;
  draft.source_path = svg_path.string();

  std::filesystem::create_directories(config.work_dir);
  std::filesystem::path png_path =
      config.work_dir / (svg_path.stem().string() + "." +
                         sha256_hex(svg_bytes.data(), svg_bytes.size()).substr(0, 8) + ".png");
  render_svg(config.renderer_cmd, svg_path, png_path);
  std::vector<std::uint8_t> image = read_file_bytes(png_path);

  std::string diagram_type = to_string(provenance);
  RefinementDelta delta;
  DiagramGraph refined;
  try {
    delta = client.refine_nodes(image, draft, diagram_type);
    refined = apply_refinement(draft, delta);
  } catch (const ProtocolError& e) {
    throw StageError("refine", e.what());
  }

  if (!refined.nodes().empty()) {
    try {
      for (const DirectedEdge& e : client.extract_edges(image, refined, diagram_type))
        refined.add_edge(e.source, e.target);
    } catch (const ProtocolError& e) {
      throw StageError("edges", e.what());
    }
  }

  if (audit_dir) {
    std::filesystem::create_directories(*audit_dir);
    std::string stem = svg_path.stem().string();
    std::ofstream(*audit_dir / (stem + ".draft.json")) << serialize_graph(draft);
    std::ofstream(*audit_dir / (stem + ".delta.json")) << delta_to_json(delta).dump(2);
    std::ofstream(*audit_dir / (stem + ".graph.json")) << serialize_graph(refined);
  }
  return refined;
}

// --- Batch evaluation -------------------------------------------------------

inline const std::array<std::string, 6> kMetricNames = {
    "node_precision", "node_recall", "node_f1", "path_precision", "path_recall", "path_f1"};

inline std::array<double, 6> metric_vector(const AlignmentReport& r) {
  return {r.node.precision, r.node.recall, r.node.f1,
          r.path.precision, r.path.recall, r.path.f1};
}

struct ItemFailure {
  std::string item_id;
  std::string stage;
  std::string message;
};

struct BatchSummary {
  std::map<std::string, AlignmentReport> per_item;
  std::array<double, 6> means{};
  std::map<std::string, std::array<std::size_t, kHistogramBins>> histograms;
  CorrelationMatrix correlation;
  std::size_t degenerate_count = 0;
  std::vector<ItemFailure> failures;
  std::vector<SkippedItem> skipped;
  // Pooled-count view of the same items, for comparison with per-item means.
  MetricTriple pooled_node;
  MetricTriple pooled_path;
};

struct BatchOptions {
  std::size_t parallelism = 4;
  double failure_rate_abort_threshold = 0.5;
  bool exclude_degenerate_from_means = false;
};

namespace detail {

inline void aggregate_summary(BatchSummary& summary, const BatchOptions& options) {
  std::vector<const AlignmentReport*> included;
  std::size_t pooled_node_tp = 0, pooled_node_fp = 0, pooled_node_fn = 0;
  std::size_t pooled_path_tp = 0, pooled_path_fp = 0, pooled_path_fn = 0;
  for (const auto& [_, report] : summary.per_item) {
    if (report.path_degenerate) ++summary.degenerate_count;
    if (!(options.exclude_degenerate_from_means && report.path_degenerate))
      included.push_back(&report);
    pooled_node_tp += report.node.tp;
    pooled_node_fp += report.node.fp;
    pooled_node_fn += report.node.fn;
    pooled_path_tp += report.path.tp;
    pooled_path_fp += report.path.fp;
    pooled_path_fn += report.path.fn;
  }
  summary.pooled_node = diagalign::detail::prf(pooled_node_tp, pooled_node_fp, pooled_node_fn);
  summary.pooled_path = diagalign::detail::prf(pooled_path_tp, pooled_path_fp, pooled_path_fn);

  std::vector<std::vector<double>> columns(6);
  for (const AlignmentReport* r : included) {
    std::array<double, 6> v = metric_vector(*r);
    for (std::size_t i = 0; i < 6; ++i) columns[i].push_back(v[i]);
  }
  for (std::size_t i = 0; i < 6; ++i) {
    double sum = 0;
    for (double v : columns[i]) sum += v;
    summary.means[i] = columns[i].empty() ? 0.0 : sum / static_cast<double>(columns[i].size());
    summary.histograms[kMetricNames[i]] = histogram_unit(columns[i]);
  }
  if (!columns[0].empty() && columns[0].size() >= 2)
    summary.correlation =
        correlation_matrix(columns, {kMetricNames.begin(), kMetricNames.end()});
}

}  // namespace detail

// Evaluates every corpus item for one generator label. Items are independent
// tasks with a bounded in-flight count; results are keyed by item_id so the
// summary never depends on completion order.
inline BatchSummary run_batch(const std::vector<CorpusRecord>& corpus,
                              const std::string& model_label, const PipelineConfig& config,
                              ModelClient& client, const BatchOptions& options = {}) {
  BatchSummary summary;
  std::mutex mu;
  std::vector<const CorpusRecord*> work;
  for (const CorpusRecord& rec : corpus) {
    if (rec.generated_svg_paths.contains(model_label))
      work.push_back(&rec);
    else
      summary.skipped.push_back({rec.item_id, "no generated diagram for label " + model_label});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      const CorpusRecord& rec = *work[i];
      try {
        DiagramGraph ref =
            extract_graph(rec.reference_svg_path, Provenance::reference, config, client);
        DiagramGraph gen = extract_graph(rec.generated_svg_paths.at(model_label),
                                         Provenance::generated, config, client);
        AlignmentReport report = evaluate_pair(gen, ref, config.match);
        std::lock_guard lock(mu);
        summary.per_item.emplace(rec.item_id, std::move(report));
      } catch (const StageError& e) {
        std::lock_guard lock(mu);
        summary.failures.push_back({rec.item_id, e.stage(), e.what()});
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        summary.failures.push_back({rec.item_id, "other", e.what()});
      }
    }
  };

  std::size_t n_threads = std::max<std::size_t>(1, std::min(options.parallelism, work.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  if (!work.empty()) {
    double failure_rate =
        static_cast<double>(summary.failures.size()) / static_cast<double>(work.size());
    if (failure_rate > options.failure_rate_abort_threshold) {
      std::string detail;
      for (const ItemFailure& f : summary.failures)
        detail += "\n  " + f.item_id + " [" + f.stage + "] " + f.message;
      throw InputError("batch aborted: failure rate " + std::to_string(failure_rate) +
                       " exceeds threshold" + detail);
    }
  }
  detail::aggregate_summary(summary, options);
  return summary;
}

// Evaluates already-extracted graph pairs; used by tests and the `eval`
// path where extraction has been done up front.
inline BatchSummary summarize_reports(const std::map<std::string, AlignmentReport>& reports,
                                      const BatchOptions& options = {}) {
  BatchSummary summary;
  summary.per_item = reports;
  detail::aggregate_summary(summary, options);
  return summary;
}

// --- Summary serialization --------------------------------------------------

inline nlohmann::json correlation_to_json(const CorrelationMatrix& m) {
  nlohmann::json flags = nlohmann::json::array();
  for (bool b : m.zero_variance) flags.push_back(b);
  return {{"names", m.names}, {"values", m.values}, {"zero_variance", std::move(flags)}};
}

inline nlohmann::json summary_to_json(const BatchSummary& s) {
  nlohmann::json per_item = nlohmann::json::object();
  for (const auto& [id, report] : s.per_item) per_item[id] = report_to_json(report);
  nlohmann::json means = nlohmann::json::object();
  for (std::size_t i = 0; i < 6; ++i) means[kMetricNames[i]] = s.means[i];
  nlohmann::json histograms = nlohmann::json::object();
  for (const auto& [name, bins] : s.histograms) histograms[name] = bins;
  nlohmann::json failures = nlohmann::json::array();
  for (const ItemFailure& f : s.failures)
    failures.push_back({{"item_id", f.item_id}, {"stage", f.stage}, {"message", f.message}});
  nlohmann::json skipped = nlohmann::json::array();
  for (const SkippedItem& sk : s.skipped)
    skipped.push_back({{"item_id", sk.item_id}, {"reason", sk.reason}});
  return {{"per_item", std::move(per_item)},
          {"means", std::move(means)},
          {"histograms", std::move(histograms)},
          {"correlation", correlation_to_json(s.correlation)},
          {"degenerate_count", s.degenerate_count},
          {"failures", std::move(failures)},
          {"skipped", std::move(skipped)},
          {"pooled_counts",
           {{"node", metric_triple_to_json(s.pooled_node)},
            {"path", metric_triple_to_json(s.pooled_path)}}}};
}

// --- CSV outputs ------------------------------------------------------------

inline std::string histograms_to_csv(
    const std::map<std::string, std::array<std::size_t, kHistogramBins>>& histograms) {
  std::ostringstream out;
  out << "metric,bin_lower,bin_upper,count\n";
  char buf[64];
  for (const auto& [name, bins] : histograms) {
    for (std::size_t i = 0; i < kHistogramBins; ++i) {
      double lower = static_cast<double>(i) / kHistogramBins;
      double upper = static_cast<double>(i + 1) / kHistogramBins;
      std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%zu\n", name.c_str(), lower, upper, bins[i]);
      out << buf;
    }
  }
  return out.str();
}

inline std::string correlation_to_csv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "metric";
  for (const std::string& name : m.names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.names.size(); ++r) {
    out << m.names[r];
    for (std::size_t c = 0; c < m.names.size(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.9f", m.values[r][c]);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace diagalign
