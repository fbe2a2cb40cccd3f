// fieldnet: co-occurrence network analysis of classified papers.
//
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 data error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fieldnet/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
namespace pl = fieldnet::pipeline;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

char delimiter_char(const std::string& d) {
  if (d.size() != 1) throw fieldnet::UsageError("--delimiter must be a single character");
  return d[0];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-occurrence network analysis of classified research papers"};
  app.require_subcommand(1);

  // build
  std::string records, out, delimiter = ",";
  auto* build = app.add_subcommand("build", "Build a co-occurrence graph from a records file");
  build->add_option("--records", records, "Records file (conference, labels joined by '/', title)")->required();
  build->add_option("--out", out, "Output graph directory")->required();
  build->add_option("--delimiter", delimiter, "Column delimiter")->capture_default_str();

  // filter
  std::string graph_dir, keep_rule = "either";
  double alpha = 0.05, sweep_start = 0.05, sweep_step = 0.05, sweep_stop = 0.95;
  bool sweep = false;
  auto* filter = app.add_subcommand("filter", "Disparity-filter backbone of a graph, or an alpha sweep");
  filter->add_option("--graph", graph_dir, "Input graph directory")->required();
  filter->add_option("--out", out, "Output directory")->required();
  auto* alpha_opt = filter->add_option("--alpha", alpha, "Significance level in (0, 1)");
  filter->add_option("--keep-rule", keep_rule, "either|both")->capture_default_str();
  filter->add_flag("--sweep", sweep, "Write alpha_sweep.csv over a grid instead of filtering");
  filter->add_option("--sweep-start", sweep_start)->capture_default_str();
  filter->add_option("--sweep-step", sweep_step)->capture_default_str();
  filter->add_option("--sweep-stop", sweep_stop)->capture_default_str();

  // centrality
  std::string mode = "unweighted";
  bool normalized = false;
  unsigned threads = 1;
  auto* centrality = app.add_subcommand("centrality", "Betweenness and weighted degree table");
  centrality->add_option("--graph", graph_dir, "Input graph directory")->required();
  centrality->add_option("--out", out, "Output CSV file")->required();
  centrality->add_option("--mode", mode, "unweighted|inverse-weight")->capture_default_str();
  centrality->add_flag("--normalized", normalized, "Divide betweenness by (n-1)(n-2)/2");
  centrality->add_option("--threads", threads)->capture_default_str();

  // communities
  std::string algorithm = "louvain";
  fieldnet::DetectionConfig detection;
  int restarts = 20;
  auto* communities = app.add_subcommand("communities", "Louvain or Leiden community detection");
  communities->add_option("--graph", graph_dir, "Input graph directory")->required();
  communities->add_option("--out", out, "Output directory")->required();
  communities->add_option("--algorithm", algorithm, "louvain|leiden")->capture_default_str();
  communities->add_option("--resolution", detection.resolution)->capture_default_str();
  communities->add_option("--seed", detection.seed)->capture_default_str();
  communities->add_option("--restarts", restarts, "Seeded restarts; the best modularity wins")->capture_default_str();
  communities->add_option("--max-passes", detection.max_passes)->capture_default_str();
  communities->add_option("--randomness", detection.randomness, "Leiden refinement temperature")
      ->capture_default_str();
  communities->add_option("--threads", threads)->capture_default_str();

  // report
  std::string partition, taxonomy, frequency, tag = "communities";
  auto* report = app.add_subcommand("report", "Community statistics and node attribute table");
  report->add_option("--graph", graph_dir, "Input graph directory")->required();
  report->add_option("--partition", partition, "Partition CSV (label, community)")->required();
  report->add_option("--taxonomy", taxonomy, "Taxonomy CSV (subfield, field)")->required();
  report->add_option("--frequency", frequency, "Frequency CSV; enables the attribute table");
  report->add_option("--out", out, "Output directory")->required();
  report->add_option("--tag", tag, "Suffix of the output file names")->capture_default_str();
  report->add_option("--mode", mode, "Betweenness path mode")->capture_default_str();

  // export
  std::string format = "edges";
  auto* exporter = app.add_subcommand("export", "Write a graph as an edge list or DOT");
  exporter->add_option("--graph", graph_dir, "Input graph directory")->required();
  exporter->add_option("--partition", partition, "Optional partition CSV");
  exporter->add_option("--format", format, "edges|dot")->capture_default_str();
  exporter->add_option("--out", out, "Output file")->required();

  // reproduce
  std::string config, fields_records, subfields_records;
  auto* reproduce = app.add_subcommand("reproduce", "Run the full analysis for both network levels");
  reproduce->add_option("--config", config, "JSON pipeline config");
  auto* r_fields = reproduce->add_option("--fields", fields_records, "Field-level records file");
  auto* r_subfields = reproduce->add_option("--subfields", subfields_records, "Subfield-level records file");
  auto* r_taxonomy = reproduce->add_option("--taxonomy", taxonomy, "Taxonomy CSV");
  auto* r_out = reproduce->add_option("--out", out, "Output directory");
  auto* r_alpha = reproduce->add_option("--alpha", alpha, "Backbone significance level");
  auto* r_keep = reproduce->add_option("--keep-rule", keep_rule, "either|both");
  auto* r_mode = reproduce->add_option("--mode", mode, "Betweenness path mode for tables");
  auto* r_seed = reproduce->add_option("--seed", detection.seed);
  auto* r_restarts = reproduce->add_option("--restarts", restarts);
  auto* r_resolution = reproduce->add_option("--resolution", detection.resolution);
  auto* r_threads = reproduce->add_option("--threads", threads);
  auto* r_delim = reproduce->add_option("--delimiter", delimiter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*build) {
      const auto result = pl::cmd_build(records, out, fieldnet::csv::Format{delimiter_char(delimiter)});
      std::cout << result.summary.dump(2) << '\n';
    } else if (*filter) {
      const auto rule = fieldnet::parse_keep_rule(keep_rule);
      if (sweep) {
        const auto grid = fieldnet::alpha_grid(sweep_start, sweep_step, sweep_stop);
        const auto points = pl::cmd_sweep(graph_dir, fs::path(out) / "alpha_sweep.csv", grid, rule);
        for (const auto& p : points) {
          std::cout << fieldnet::format_fixed(p.alpha, 2) << '\t' << fieldnet::format_fixed(p.density) << '\n';
        }
      } else {
        if (!alpha_opt->count()) throw fieldnet::UsageError("filter needs --alpha (or --sweep)");
        const auto r = pl::cmd_filter(graph_dir, out, fieldnet::FilterParams{alpha, rule});
        std::cout << "density " << fieldnet::format_fixed(r.density_before) << " -> "
                  << fieldnet::format_fixed(r.density_after) << " (" << fieldnet::format_fixed(r.percent_reduction, 2)
                  << "% reduction)\n";
      }
    } else if (*centrality) {
      pl::cmd_centrality(graph_dir, out, fieldnet::parse_path_mode(mode), normalized, threads);
    } else if (*communities) {
      const auto alg = fieldnet::parse_algorithm(algorithm);
      const auto r = pl::cmd_communities(graph_dir, out, alg, detection, restarts, threads);
      std::cout << r.partition.community_count() << " communities, modularity " << fieldnet::format_fixed(r.modularity)
                << '\n';
    } else if (*report) {
      pl::ReportInputs in{graph_dir, partition, taxonomy, std::nullopt, out, tag, fieldnet::parse_path_mode(mode), 1};
      if (!frequency.empty()) in.frequency = frequency;
      pl::cmd_report(in);
    } else if (*exporter) {
      std::optional<fs::path> p;
      if (!partition.empty()) p = partition;
      if (format != "edges" && format != "dot") throw fieldnet::UsageError("--format must be edges or dot");
      pl::cmd_export(graph_dir, p, format == "dot" ? pl::ExportFormat::kDot : pl::ExportFormat::kEdges, out);
    } else if (*reproduce) {
      pl::Config cfg = config.empty() ? pl::Config{} : pl::load_config(config);
      if (r_fields->count()) cfg.fields_records = fields_records;
      if (r_subfields->count()) cfg.subfields_records = subfields_records;
      if (r_taxonomy->count()) cfg.taxonomy = taxonomy;
      if (r_out->count()) cfg.output_dir = out;
      if (r_alpha->count()) cfg.alpha = alpha;
      if (r_keep->count()) cfg.keep_rule = fieldnet::parse_keep_rule(keep_rule);
      if (r_mode->count()) cfg.mode = fieldnet::parse_path_mode(mode);
      if (r_seed->count()) cfg.detection.seed = detection.seed;
      if (r_restarts->count()) cfg.restarts = restarts;
      if (r_resolution->count()) cfg.detection.resolution = detection.resolution;
      if (r_threads->count()) cfg.threads = threads;
      if (r_delim->count()) cfg.delimiter = delimiter_char(delimiter);
      pl::cmd_reproduce(cfg);
      std::cout << "wrote " << (cfg.output_dir / "reproduction_summary.json").string() << '\n';
    }
  } catch (const fieldnet::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fieldnet::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fieldnet::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
