// Command-line front end: extract, eval, batch, stats, generate.
//
// Exit codes: 0 success, 1 usage error, 2 batch failure threshold exceeded,
// 3 I/O or config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diagalign/alignment.hpp"
#include "diagalign/config.hpp"
#include "diagalign/errors.hpp"
#include "diagalign/graph.hpp"
#include "diagalign/harness.hpp"
#include "diagalign/http_transport.hpp"
#include "diagalign/model_client.hpp"
#include "diagalign/stats.hpp"

namespace fs = std::filesystem;
using namespace diagalign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBatchFailure = 2;
constexpr int kExitIo = 3;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << content;
}

ModelClient make_client(const ToolConfig& cfg, const std::string& mock_dir) {
  std::shared_ptr<ModelTransport> transport;
  if (!mock_dir.empty())
    transport = std::make_shared<MockTransport>(mock_dir);
  else
    transport = std::make_shared<HttpTransport>(cfg.endpoint);
  return ModelClient(transport, cfg.endpoint);
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const Diagnostic& d : diags) std::cerr << "warning: " << d.code << ": " << d.detail << "\n";
}

int cmd_extract(const ToolConfig& cfg, const std::string& mock_dir, const fs::path& in_path,
                const fs::path& out_path, const std::string& provenance,
                const std::string& audit_dir) {
  ModelClient client = make_client(cfg, mock_dir);
  Provenance prov = provenance == "generated" ? Provenance::generated : Provenance::reference;
  std::optional<fs::path> audit;
  if (!audit_dir.empty()) audit = fs::path(audit_dir);
  std::vector<Diagnostic> diags;
  DiagramGraph graph = extract_graph(in_path, prov, cfg.pipeline, client, audit, &diags);
  print_diagnostics(diags);
  write_text_file(out_path, serialize_graph(graph) + "\n");
  std::cout << "wrote " << out_path.string() << " (" << graph.nodes().size() << " nodes, "
            << graph.edges().size() << " edges)\n";
  return kExitOk;
}

int cmd_eval(const ToolConfig& cfg, const fs::path& gen_path, const fs::path& ref_path,
             const std::string& out_path) {
  DiagramGraph gen = parse_graph(read_text_file(gen_path));
  DiagramGraph ref = parse_graph(read_text_file(ref_path));
  AlignmentReport report = evaluate_pair(gen, ref, cfg.pipeline.match);
  std::string json = report_to_json(report).dump(2);
  if (!out_path.empty()) write_text_file(out_path, json + "\n");
  std::cout << json << "\n";
  return kExitOk;
}

int cmd_batch(const ToolConfig& cfg, const std::string& mock_dir, const fs::path& manifest,
              const std::string& label, const fs::path& out_dir) {
  ModelClient client = make_client(cfg, mock_dir);
  CorpusLoadResult corpus = load_corpus(manifest);
  for (const SkippedItem& s : corpus.skipped)
    std::cerr << "skipped " << s.item_id << ": " << s.reason << "\n";

  BatchSummary summary;
  try {
    summary = run_batch(corpus.records, label, cfg.pipeline, client, cfg.batch);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBatchFailure;
  }
  summary.skipped.insert(summary.skipped.end(), corpus.skipped.begin(), corpus.skipped.end());

  fs::create_directories(out_dir / "reports");
  for (const auto& [id, report] : summary.per_item)
    write_text_file(out_dir / "reports" / (id + ".json"), report_to_json(report).dump(2) + "\n");
  write_text_file(out_dir / "summary.json", summary_to_json(summary).dump(2) + "\n");
  write_text_file(out_dir / "histograms.csv", histograms_to_csv(summary.histograms));
  if (!summary.correlation.names.empty())
    write_text_file(out_dir / "correlation.csv", correlation_to_csv(summary.correlation));

  std::cout << "evaluated " << summary.per_item.size() << " items ("
            << summary.failures.size() << " failures, " << summary.skipped.size()
            << " skipped); summary at " << (out_dir / "summary.json").string() << "\n";
  return kExitOk;
}

int cmd_stats(const fs::path& reports_dir, const std::string& external_csv,
              const fs::path& out_dir, const BatchOptions& options) {
  std::map<std::string, AlignmentReport> reports;
  for (const auto& entry : fs::directory_iterator(reports_dir)) {
    if (entry.path().extension() != ".json") continue;
    reports.emplace(entry.path().stem().string(),
                    report_from_json(nlohmann::json::parse(read_text_file(entry.path()))));
  }
  if (reports.size() < 2) throw InputError("stats needs at least 2 report files");

  std::vector<std::vector<double>> columns(6);
  std::vector<std::string> names(kMetricNames.begin(), kMetricNames.end());
  std::vector<std::string> item_ids;
  for (const auto& [id, report] : reports) {
    if (options.exclude_degenerate_from_means && report.path_degenerate) continue;
    item_ids.push_back(id);
    std::array<double, 6> v = metric_vector(report);
    for (std::size_t i = 0; i < 6; ++i) columns[i].push_back(v[i]);
  }

  // External metric columns: CSV with header "item_id,<name>..." and one
  // row per item. Only items present in the reports directory are used.
  if (!external_csv.empty()) {
    std::ifstream in(external_csv);
    if (!in) throw InputError("cannot open external CSV: " + external_csv);
    std::string line;
    if (!std::getline(in, line)) throw InputError("external CSV is empty");
    std::vector<std::string> ext_names;
    std::stringstream header(line);
    std::string cell;
    std::getline(header, cell, ',');  // item_id column
    while (std::getline(header, cell, ',')) ext_names.push_back(cell);
    std::map<std::string, std::vector<double>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string id;
      std::getline(ss, id, ',');
      std::vector<double> vals;
      while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
      if (vals.size() != ext_names.size())
        throw InputError("external CSV row for " + id + " has wrong column count");
      rows[id] = std::move(vals);
    }
    for (std::size_t c = 0; c < ext_names.size(); ++c) {
      std::vector<double> col;
      for (const std::string& id : item_ids) {
        auto it = rows.find(id);
        if (it == rows.end())
          throw InputError("external CSV is missing item " + id);
        col.push_back(it->second[c]);
      }
      columns.push_back(std::move(col));
      names.push_back(ext_names[c]);
    }
  }

  std::map<std::string, std::array<std::size_t, kHistogramBins>> histograms;
  for (std::size_t i = 0; i < 6; ++i) histograms[names[i]] = histogram_unit(columns[i]);
  CorrelationMatrix corr = correlation_matrix(columns, names);

  write_text_file(out_dir / "histograms.csv", histograms_to_csv(histograms));
  write_text_file(out_dir / "correlation.csv", correlation_to_csv(corr));
  std::cout << "wrote " << (out_dir / "histograms.csv").string() << " and "
            << (out_dir / "correlation.csv").string() << " over " << item_ids.size()
            << " items\n";
  return kExitOk;
}

int cmd_generate(const ToolConfig& cfg, const std::string& mock_dir, const fs::path& context_file,
                 const fs::path& caption_file, const std::string& layout_file,
                 const fs::path& out_path) {
  ModelClient client = make_client(cfg, mock_dir);
  std::optional<std::string> layout;
  if (!layout_file.empty()) layout = read_text_file(layout_file);
  std::string svg =
      client.generate_diagram(read_text_file(context_file), read_text_file(caption_file), layout);
  write_text_file(out_path, svg);
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SVG diagram graph extraction and alignment evaluation"};
  app.require_subcommand(1);

  std::string config_path, mock_dir;
  app.add_option("--config", config_path, "JSON config file with all tunables");
  app.add_option("--mock", mock_dir, "replay recorded model replies from this fixtures directory");

  auto* extract = app.add_subcommand("extract", "SVG file -> graph JSON");
  std::string ex_in, ex_out, ex_prov = "reference", ex_audit;
  extract->add_option("--in", ex_in, "input SVG")->required();
  extract->add_option("--out", ex_out, "output graph JSON")->required();
  extract->add_option("--provenance", ex_prov, "reference|generated")
      ->check(CLI::IsMember({"reference", "generated"}));
  extract->add_option("--audit-dir", ex_audit, "persist draft graph and refinement delta here");

  auto* eval = app.add_subcommand("eval", "two graph JSONs -> alignment report");
  std::string ev_gen, ev_ref, ev_out;
  eval->add_option("--gen", ev_gen, "generated graph JSON")->required();
  eval->add_option("--ref", ev_ref, "reference graph JSON")->required();
  eval->add_option("--out", ev_out, "also write the report here");

  auto* batch = app.add_subcommand("batch", "corpus manifest -> summary + per-item reports");
  std::string ba_manifest, ba_label, ba_out;
  batch->add_option("--manifest", ba_manifest, "JSONL corpus manifest")->required();
  batch->add_option("--label", ba_label, "generator label to evaluate")->required();
  batch->add_option("--out-dir", ba_out, "output directory")->required();

  auto* stats = app.add_subcommand("stats", "reports directory -> histogram + correlation CSVs");
  std::string st_reports, st_external, st_out;
  bool st_exclude_degenerate = false;
  stats->add_option("--reports-dir", st_reports, "directory of per-item report JSONs")->required();
  stats->add_option("--external-csv", st_external,
                    "extra metric columns (header: item_id,<name>,...)");
  stats->add_option("--out-dir", st_out, "output directory")->required();
  stats->add_flag("--exclude-degenerate", st_exclude_degenerate,
                  "drop degenerate-path items from the statistics");

  auto* generate = app.add_subcommand("generate", "paper context + caption -> SVG via the model");
  std::string ge_context, ge_caption, ge_layout, ge_out;
  generate->add_option("--context-file", ge_context, "paper context text file")->required();
  generate->add_option("--caption-file", ge_caption, "diagram caption text file")->required();
  generate->add_option("--layout-file", ge_layout, "optional layout caption text file");
  generate->add_option("--out", ge_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    ToolConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    BatchOptions stats_options = cfg.batch;
    stats_options.exclude_degenerate_from_means = st_exclude_degenerate;

    if (extract->parsed()) return cmd_extract(cfg, mock_dir, ex_in, ex_out, ex_prov, ex_audit);
    if (eval->parsed()) return cmd_eval(cfg, ev_gen, ev_ref, ev_out);
    if (batch->parsed()) return cmd_batch(cfg, mock_dir, ba_manifest, ba_label, ba_out);
    if (stats->parsed()) return cmd_stats(st_reports, st_external, st_out, stats_options);
    if (generate->parsed())
      return cmd_generate(cfg, mock_dir, ge_context, ge_caption, ge_layout, ge_out);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
