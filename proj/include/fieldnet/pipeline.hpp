#pragma once

// File-based pipeline stages behind the `fieldnet` command line tool. Each
// stage reads the files written by the previous one, so stages can be run
// and inspected one at a time.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fieldnet/fieldnet.hpp"

namespace fieldnet::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// Graph directory layout.
inline constexpr const char* kEdgesFile = "edges.csv";
inline constexpr const char* kNodesFile = "nodes.csv";
inline constexpr const char* kFrequencyFile = "frequency.csv";
inline constexpr const char* kRejectedFile = "rejected.csv";
inline constexpr const char* kSummaryFile = "summary.json";

inline std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

inline void write_json(const fs::path& path, const json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

inline WeightedGraph load_graph(const fs::path& dir) {
  auto edges = open_in(dir / kEdgesFile);
  if (fs::exists(dir / kNodesFile)) {
    auto nodes = open_in(dir / kNodesFile);
    return read_edge_list(edges, &nodes);
  }
  return read_edge_list(edges);
}

inline void save_graph(const fs::path& dir, const WeightedGraph& g) {
  {
    auto out = open_out(dir / kEdgesFile);
    write_edge_list(out, GraphBundle{&g, std::nullopt, {}});
  }
  auto out = open_out(dir / kNodesFile);
  write_node_list(out, g);
}

inline Taxonomy load_taxonomy_file(const fs::path& path, csv::Format format = {}) {
  auto in = open_in(path);
  return load_taxonomy(in, format);
}

inline FrequencyTable load_frequency_file(const fs::path& path) {
  auto in = open_in(path);
  return read_frequency(in);
}

inline json density_or_null(const WeightedGraph& g) {
  if (g.node_count() < 2) return nullptr;
  return density(g);
}

inline json top_labels(const WeightedGraph& g, const CentralityScores& scores, std::size_t k) {
  json out = json::array();
  if (g.node_count() == 0) return out;
  for (const auto& r : rank(g, scores, k)) out.push_back({{"label", r.label}, {"score", r.score}});
  return out;
}

// ---------------------------------------------------------------- build

struct BuildResult {
  WeightedGraph graph;
  FrequencyTable frequency;
  json summary;
};

/// Parses a records file and writes the co-occurrence graph, label
/// frequencies, rejected rows and a summary into `out_dir`. Nothing is
/// written when the file holds no usable record.
inline BuildResult cmd_build(const fs::path& records, const fs::path& out_dir, csv::Format format = {}) {
  auto in = open_in(records);
  auto parsed = parse_records(in, format);
  if (parsed.records.empty()) {
    throw DataError(records.string() + ": no usable records (" + std::to_string(parsed.rejected.size()) +
                    " rejected rows)");
  }
  BuildResult result{build_cooccurrence(parsed.records), label_frequency(parsed.records), {}};
  const auto& g = result.graph;
  result.summary = {
      {"records", parsed.records.size()},
      {"rejected_rows", parsed.rejected.size()},
      {"nodes", g.node_count()},
      {"edges", g.edge_count()},
      {"density", density_or_null(g)},
      {"connected", is_connected(g)},
  };

  save_graph(out_dir, g);
  {
    auto out = open_out(out_dir / kFrequencyFile);
    write_frequency(out, result.frequency);
  }
  {
    auto out = open_out(out_dir / kRejectedFile);
    write_rejected(out, parsed.rejected);
  }
  write_json(out_dir / kSummaryFile, result.summary);
  return result;
}

// ---------------------------------------------------------------- filter

inline DensityReduction cmd_filter(const fs::path& graph_dir, const fs::path& out_dir, const FilterParams& params) {
  params.validate();
  const auto g = load_graph(graph_dir);
  const auto backbone = disparity_filter(g, params);
  const auto report = density_reduction_report(g, backbone);
  save_graph(out_dir, backbone);
  auto out = open_out(out_dir / "filter_report.csv");
  write_density_reduction(out, report);
  csv::write_row(out, {"alpha", format_weight(params.alpha)});
  csv::write_row(out, {"keep_rule", std::string(to_string(params.keep_rule))});
  return report;
}

inline void write_sweep(std::ostream& out, const std::vector<SweepPoint>& points, double density_before) {
  csv::write_row(out, {"alpha", "edges", "density", "percent_reduction"});
  for (const auto& p : points) {
    csv::write_row(out, {format_fixed(p.alpha, 2), std::to_string(p.edges), format_fixed(p.density),
                         format_fixed(percent_reduction(density_before, p.density), 2)});
  }
}

inline std::vector<SweepPoint> cmd_sweep(const fs::path& graph_dir, const fs::path& out_file,
                                         const std::vector<double>& grid, KeepRule rule) {
  const auto g = load_graph(graph_dir);
  auto points = alpha_sweep(g, grid, rule);
  auto out = open_out(out_file);
  write_sweep(out, points, density(g));
  return points;
}

// ---------------------------------------------------------------- centrality

inline void write_centrality(std::ostream& out, const WeightedGraph& g, const CentralityScores& betw,
                             const CentralityScores& wdeg) {
  const auto betw_rank = rank_positions(g, betw);
  const auto wdeg_rank = rank_positions(g, wdeg);
  std::vector<std::uint32_t> order(g.node_count());
  for (std::uint32_t u = 0; u < order.size(); ++u) order[betw_rank[u] - 1] = u;
  csv::write_row(out, {"label", "betweenness", "weighted_degree", "betweenness_rank", "weighted_degree_rank"});
  for (const auto u : order) {
    csv::write_row(out, {g.label(NodeId{u}), format_fixed(betw.values[u]), format_fixed(wdeg.values[u]),
                         std::to_string(betw_rank[u]), std::to_string(wdeg_rank[u])});
  }
}

inline CentralityScores cmd_centrality(const fs::path& graph_dir, const fs::path& out_file, PathMode mode,
                                       bool normalized, unsigned threads = 1) {
  const auto g = load_graph(graph_dir);
  auto betw = betweenness(g, mode, normalized, threads);
  auto out = open_out(out_file);
  write_centrality(out, g, betw, weighted_degree(g));
  return betw;
}

// ---------------------------------------------------------------- communities

inline json detection_summary(Algorithm algorithm, const DetectionConfig& cfg, int restarts,
                              const DetectionResult& result) {
  json sizes = json::array();
  for (const auto s : result.partition.sizes()) sizes.push_back(s);
  return {
      {"algorithm", to_string(algorithm)},
      {"resolution", cfg.resolution},
      {"base_seed", cfg.seed},
      {"restarts", restarts},
      {"winning_seed", result.seed},
      {"modularity", result.modularity},
      {"communities", result.partition.community_count()},
      {"sizes", sizes},
  };
}

inline DetectionResult cmd_communities(const fs::path& graph_dir, const fs::path& out_dir, Algorithm algorithm,
                                       const DetectionConfig& cfg, int restarts, unsigned threads = 1) {
  const auto g = load_graph(graph_dir);
  auto result = detect_best(g, algorithm, cfg, restarts, threads);
  const auto name = std::string(to_string(algorithm));
  {
    auto out = open_out(out_dir / ("partition_" + name + ".csv"));
    write_partition(out, g, result.partition);
  }
  write_json(out_dir / ("communities_" + name + ".json"), detection_summary(algorithm, cfg, restarts, result));
  return result;
}

// ---------------------------------------------------------------- report

struct ReportInputs {
  fs::path graph_dir;
  fs::path partition;
  fs::path taxonomy;
  std::optional<fs::path> frequency;
  fs::path out_dir;
  std::string tag = "communities";
  PathMode mode = PathMode::kUnweighted;
  unsigned threads = 1;
};

inline std::vector<CommunityStats> cmd_report(const ReportInputs& in) {
  const auto g = load_graph(in.graph_dir);
  auto pin = open_in(in.partition);
  const auto p = read_partition(pin, g);
  const auto taxonomy = load_taxonomy_file(in.taxonomy);
  const auto betw = betweenness(g, in.mode, false, in.threads);
  auto stats = community_stats(g, p, betw, taxonomy);
  {
    auto out = open_out(in.out_dir / ("community_stats_" + in.tag + ".csv"));
    write_community_stats(out, stats);
  }
  if (in.frequency) {
    const auto freq = load_frequency_file(*in.frequency);
    auto out = open_out(in.out_dir / ("attributes_" + in.tag + ".csv"));
    write_attributes(out, node_attribute_export(g, betw, weighted_degree(g), freq, p, taxonomy));
  }
  return stats;
}

// ---------------------------------------------------------------- export

enum class ExportFormat { kEdges, kDot };

inline void cmd_export(const fs::path& graph_dir, const std::optional<fs::path>& partition, ExportFormat format,
                       const fs::path& out_file) {
  const auto g = load_graph(graph_dir);
  GraphBundle bundle{&g, std::nullopt, {}};
  if (partition) {
    auto in = open_in(*partition);
    bundle.partition = read_partition(in, g);
  }
  auto out = open_out(out_file);
  if (format == ExportFormat::kEdges) {
    write_edge_list(out, bundle);
  } else {
    write_dot(out, bundle);
  }
}

// ---------------------------------------------------------------- reproduce

struct Config {
  fs::path fields_records;
  fs::path subfields_records;
  fs::path taxonomy;
  fs::path output_dir = "out";
  char delimiter = ',';
  double alpha = 0.05;
  KeepRule keep_rule = KeepRule::kEitherEndpoint;
  double sweep_start = 0.05;
  double sweep_step = 0.05;
  double sweep_stop = 0.95;
  PathMode mode = PathMode::kUnweighted;
  bool normalized = false;
  DetectionConfig detection{};
  int restarts = 20;
  unsigned threads = 1;

  void validate() const {
    if (fields_records.empty() || subfields_records.empty() || taxonomy.empty()) {
      throw UsageError("reproduce needs fields_records, subfields_records and taxonomy");
    }
    for (const auto& p : {fields_records, subfields_records, taxonomy}) {
      if (!fs::exists(p)) throw IoError("input not found: " + p.string());
    }
    FilterParams{alpha, keep_rule}.validate();
    detection.validate();
    if (restarts < 1) throw UsageError("restarts must be at least 1");
  }
};

/// Reads a JSON config. Relative input paths resolve against the config
/// file's directory.
inline Config load_config(const fs::path& path) {
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  Config cfg;
  try {
    if (j.contains("fields_records")) cfg.fields_records = resolve(j.at("fields_records").get<std::string>());
    if (j.contains("subfields_records")) cfg.subfields_records = resolve(j.at("subfields_records").get<std::string>());
    if (j.contains("taxonomy")) cfg.taxonomy = resolve(j.at("taxonomy").get<std::string>());
    if (j.contains("output_dir")) cfg.output_dir = resolve(j.at("output_dir").get<std::string>());
    if (j.contains("delimiter")) {
      const auto d = j.at("delimiter").get<std::string>();
      if (d.size() != 1) throw UsageError("delimiter must be a single character");
      cfg.delimiter = d[0];
    }
    if (j.contains("filter")) {
      const auto& f = j.at("filter");
      cfg.alpha = f.value("alpha", cfg.alpha);
      if (f.contains("keep_rule")) cfg.keep_rule = parse_keep_rule(f.at("keep_rule").get<std::string>());
      cfg.sweep_start = f.value("sweep_start", cfg.sweep_start);
      cfg.sweep_step = f.value("sweep_step", cfg.sweep_step);
      cfg.sweep_stop = f.value("sweep_stop", cfg.sweep_stop);
    }
    if (j.contains("centrality")) {
      const auto& c = j.at("centrality");
      if (c.contains("mode")) cfg.mode = parse_path_mode(c.at("mode").get<std::string>());
      cfg.normalized = c.value("normalized", cfg.normalized);
    }
    if (j.contains("detection")) {
      const auto& d = j.at("detection");
      cfg.detection.resolution = d.value("resolution", cfg.detection.resolution);
      cfg.detection.seed = d.value("seed", cfg.detection.seed);
      cfg.detection.max_passes = d.value("max_passes", cfg.detection.max_passes);
      cfg.detection.randomness = d.value("randomness", cfg.detection.randomness);
      cfg.restarts = d.value("restarts", cfg.restarts);
    }
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return cfg;
}

inline json stats_json(const std::vector<CommunityStats>& stats) {
  json rows = json::array();
  for (const auto& s : stats) {
    rows.push_back({{"community", s.id},
                    {"size", s.size},
                    {"density", s.density},
                    {"most_central", s.most_central},
                    {"fields", s.dominant_fields}});
  }
  return rows;
}

/// Runs the whole analysis for both levels and writes every artifact plus
/// `reproduction_summary.json` under `cfg.output_dir`.
inline json cmd_reproduce(const Config& cfg) {
  cfg.validate();
  const csv::Format format{cfg.delimiter};
  const auto& root = cfg.output_dir;
  const auto taxonomy = load_taxonomy_file(cfg.taxonomy, format);
  // Fail before writing anything when either records file is unusable.
  for (const auto& path : {cfg.fields_records, cfg.subfields_records}) {
    auto in = open_in(path);
    if (parse_records(in, format).records.empty()) throw DataError(path.string() + ": no usable records");
  }
  const std::vector<PathMode> modes{PathMode::kUnweighted, PathMode::kInverseWeight};
  json summary;

  // Fields network: build, calibrate and apply the backbone filter, then
  // centrality and Louvain communities on the backbone.
  {
    const auto dir = root / "fields";
    auto built = cmd_build(cfg.fields_records, dir / "graph", format);
    const auto grid = alpha_grid(cfg.sweep_start, cfg.sweep_step, cfg.sweep_stop);
    const auto sweep = cmd_sweep(dir / "graph", dir / "alpha_sweep.csv", grid, cfg.keep_rule);
    const FilterParams params{cfg.alpha, cfg.keep_rule};
    const auto reduction = cmd_filter(dir / "graph", dir / "backbone", params);
    const auto backbone = load_graph(dir / "backbone");

    json fields = {{"build", built.summary},
                   {"filter",
                    {{"alpha", cfg.alpha},
                     {"keep_rule", to_string(cfg.keep_rule)},
                     {"density_before", reduction.density_before},
                     {"density_after", reduction.density_after},
                     {"percent_reduction", reduction.percent_reduction},
                     {"edges_after", reduction.edges_after}}}};
    json sweep_rows = json::array();
    for (const auto& p : sweep) sweep_rows.push_back({{"alpha", p.alpha}, {"edges", p.edges}, {"density", p.density}});
    fields["alpha_sweep"] = sweep_rows;

    const auto wdeg = weighted_degree(backbone);
    for (const auto mode : modes) {
      const auto betw = betweenness(backbone, mode, cfg.normalized, cfg.threads);
      auto out = open_out(dir / ("centrality_" + std::string(to_string(mode)) + ".csv"));
      write_centrality(out, backbone, betw, wdeg);
      fields["top_betweenness"][std::string(to_string(mode))] = top_labels(backbone, betw, 3);
    }
    fields["top_frequency"] = built.frequency.ranked().empty() ? json(nullptr) : json(built.frequency.ranked()[0].first);

    if (backbone.total_weight() > 0.0) {
      const auto louv = detect_best(backbone, Algorithm::kLouvain, cfg.detection, cfg.restarts, cfg.threads);
      {
        auto out = open_out(dir / "partition_louvain.csv");
        write_partition(out, backbone, louv.partition);
      }
      fields["louvain"] = detection_summary(Algorithm::kLouvain, cfg.detection, cfg.restarts, louv);
      const auto betw = betweenness(backbone, cfg.mode, cfg.normalized, cfg.threads);
      const auto attrs = node_attribute_export(backbone, betw, wdeg, built.frequency, louv.partition, taxonomy);
      {
        auto out = open_out(dir / "attributes.csv");
        write_attributes(out, attrs);
      }
      GraphBundle bundle{&backbone, louv.partition, {}};
      for (const auto& a : attrs) {
        bundle.attributes["frequency"].push_back(std::to_string(a.frequency));
        bundle.attributes["betweenness"].push_back(format_fixed(a.betweenness));
      }
      auto out = open_out(dir / "network.dot");
      write_dot(out, bundle);
    }
    summary["fields"] = std::move(fields);
  }

  // Subfields network: structure, centrality, Louvain and Leiden tables.
  {
    const auto dir = root / "subfields";
    auto built = cmd_build(cfg.subfields_records, dir / "graph", format);
    const auto& g = built.graph;
    json sub = {{"build", built.summary}};
    const auto wdeg = weighted_degree(g);
    sub["top_weighted_degree"] = top_labels(g, wdeg, 3);
    for (const auto mode : modes) {
      const auto betw = betweenness(g, mode, cfg.normalized, cfg.threads);
      auto out = open_out(dir / ("centrality_" + std::string(to_string(mode)) + ".csv"));
      write_centrality(out, g, betw, wdeg);
      sub["top_betweenness"][std::string(to_string(mode))] = top_labels(g, betw, 3);
    }

    if (g.total_weight() > 0.0) {
      const auto betw = betweenness(g, cfg.mode, cfg.normalized, cfg.threads);
      for (const auto algorithm : {Algorithm::kLouvain, Algorithm::kLeiden}) {
        const auto name = std::string(to_string(algorithm));
        const auto result = detect_best(g, algorithm, cfg.detection, cfg.restarts, cfg.threads);
        {
          auto out = open_out(dir / ("partition_" + name + ".csv"));
          write_partition(out, g, result.partition);
        }
        const auto stats = community_stats(g, result.partition, betw, taxonomy);
        {
          auto out = open_out(dir / ("community_stats_" + name + ".csv"));
          write_community_stats(out, stats);
        }
        const auto attrs = node_attribute_export(g, betw, wdeg, built.frequency, result.partition, taxonomy);
        {
          auto out = open_out(dir / ("attributes_" + name + ".csv"));
          write_attributes(out, attrs);
        }
        GraphBundle bundle{&g, result.partition, {}};
        for (const auto& a : attrs) {
          bundle.attributes["parent_field"].push_back(a.parent_field);
          bundle.attributes["weighted_degree"].push_back(format_fixed(a.weighted_degree));
          bundle.attributes["betweenness"].push_back(format_fixed(a.betweenness));
        }
        auto out = open_out(dir / ("network_" + name + ".dot"));
        write_dot(out, bundle);
        auto entry = detection_summary(algorithm, cfg.detection, cfg.restarts, result);
        entry["table"] = stats_json(stats);
        sub[name] = std::move(entry);
      }
    }
    summary["subfields"] = std::move(sub);
  }

  write_json(root / "reproduction_summary.json", summary);
  return summary;
}

}  // namespace fieldnet::pipeline
