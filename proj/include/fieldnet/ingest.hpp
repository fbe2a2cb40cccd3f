#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fieldnet/csv.hpp"
#include "fieldnet/error.hpp"
#include "fieldnet/graph.hpp"

namespace fieldnet {

/// One classified paper.
struct PaperRecord {
  std::string conference;
  std::string title;
  std::vector<std::string> labels;  // canonical, distinct, non-empty
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<PaperRecord> records;
  std::vector<RejectedRow> rejected;
};

/// Trims the label and collapses internal whitespace runs to one space.
/// Case is preserved.
[[nodiscard]] inline std::string canonicalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char c : raw) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

/// Splits a "/"-joined label field into canonical labels, dropping empties
/// and repeated labels (first occurrence wins).
[[nodiscard]] inline std::vector<std::string> split_labels(std::string_view field) {
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (start <= field.size()) {
    const auto slash = field.find('/', start);
    const auto end = slash == std::string_view::npos ? field.size() : slash;
    auto label = canonicalize_label(field.substr(start, end - start));
    if (!label.empty() && std::find(labels.begin(), labels.end(), label) == labels.end()) {
      labels.push_back(std::move(label));
    }
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return labels;
}

/// Reads a records file: a header row, then rows of
/// (conference, labels joined by "/", title). Malformed rows and rows without
/// labels are reported in `rejected` rather than dropped silently.
[[nodiscard]] inline ParseResult parse_records(std::istream& in, csv::Format format = {}) {
  if (!in) throw IoError("records stream is not readable");
  ParseResult result;
  csv::Reader reader(in, format);
  csv::Row row;
  bool header = true;
  while (reader.next(row)) {
    if (header) {
      header = false;
      continue;
    }
    if (row.fields.size() != 3) {
      result.rejected.push_back(
          {row.line, "expected 3 columns, found " + std::to_string(row.fields.size())});
      continue;
    }
    auto labels = split_labels(row.fields[1]);
    if (labels.empty()) {
      result.rejected.push_back({row.line, "empty label field"});
      continue;
    }
    result.records.push_back(PaperRecord{canonicalize_label(row.fields[0]), canonicalize_label(row.fields[2]),
                                         std::move(labels)});
  }
  if (in.bad()) throw IoError("records stream failed while reading");
  return result;
}

inline void write_rejected(std::ostream& out, std::span<const RejectedRow> rejected) {
  csv::write_row(out, {"line", "reason"});
  for (const auto& r : rejected) csv::write_row(out, {std::to_string(r.line), r.reason});
}

/// Co-occurrence graph: one node per distinct label, and the weight of
/// {u, v} counts the records carrying both u and v. Nodes appear in order of
/// first occurrence. The result is frozen.
[[nodiscard]] inline WeightedGraph build_cooccurrence(std::span<const PaperRecord> records) {
  WeightedGraph g;
  std::vector<NodeId> ids;
  for (const auto& record : records) {
    ids.clear();
    for (const auto& label : record.labels) {
      const auto id = g.add_node(label);
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) g.increment_edge(ids[i], ids[j], 1.0);
    }
  }
  g.freeze();
  return g;
}

/// Number of papers carrying each label.
struct FrequencyTable {
  std::map<std::string, std::size_t> counts;

  [[nodiscard]] std::size_t count(const std::string& label) const {
    const auto it = counts.find(label);
    return it == counts.end() ? 0 : it->second;
  }

  /// Labels by count descending, ties by label.
  [[nodiscard]] std::vector<std::pair<std::string, std::size_t>> ranked() const {
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
  }
};

[[nodiscard]] inline FrequencyTable label_frequency(std::span<const PaperRecord> records) {
  FrequencyTable table;
  for (const auto& record : records) {
    std::vector<std::string_view> seen;
    for (const auto& label : record.labels) {
      if (std::find(seen.begin(), seen.end(), label) != seen.end()) continue;
      seen.push_back(label);
      ++table.counts[label];
    }
  }
  return table;
}

inline void write_frequency(std::ostream& out, const FrequencyTable& table) {
  csv::write_row(out, {"label", "papers"});
  for (const auto& [label, count] : table.ranked()) csv::write_row(out, {label, std::to_string(count)});
}

[[nodiscard]] inline FrequencyTable read_frequency(std::istream& in) {
  if (!in) throw IoError("frequency stream is not readable");
  FrequencyTable table;
  csv::Reader reader(in);
  csv::Row row;
  bool header = true;
  while (reader.next(row)) {
    if (std::exchange(header, false)) continue;
    if (row.fields.size() != 2) throw DataError("frequency line " + std::to_string(row.line) + ": expected 2 columns");
    try {
      table.counts[canonicalize_label(row.fields[0])] = std::stoul(std::string(csv::trim(row.fields[1])));
    } catch (const std::logic_error&) {
      throw DataError("frequency line " + std::to_string(row.line) + ": bad count");
    }
  }
  return table;
}

/// Share of attempted papers that ended up classified, in percent.
[[nodiscard]] inline double classification_coverage(std::size_t classified, std::size_t attempted) {
  if (attempted == 0) throw DataError("coverage is undefined for zero attempted papers");
  if (classified > attempted) throw DataError("classified count exceeds attempted count");
  return 100.0 * static_cast<double>(classified) / static_cast<double>(attempted);
}

/// Two-level classification: subfield -> parent field.
class Taxonomy {
 public:
  void add(std::string_view subfield, std::string_view field) {
    auto sub = canonicalize_label(subfield);
    auto parent = canonicalize_label(field);
    if (sub.empty() || parent.empty()) throw DataError("taxonomy entries must be non-empty");
    if (auto it = parent_.find(sub); it != parent_.end()) {
      if (it->second != parent) {
        throw DataError("conflicting parents for '" + sub + "': '" + it->second + "' and '" + parent + "'");
      }
      return;
    }
    if (std::find(fields_.begin(), fields_.end(), parent) == fields_.end()) fields_.push_back(parent);
    parent_.emplace(std::move(sub), std::move(parent));
  }

  [[nodiscard]] std::optional<std::string> parent(std::string_view subfield) const {
    if (auto it = parent_.find(std::string(subfield)); it != parent_.end()) return it->second;
    return std::nullopt;
  }

  /// Field labels in order of first appearance.
  [[nodiscard]] std::span<const std::string> fields() const noexcept { return fields_; }
  [[nodiscard]] std::size_t size() const noexcept { return parent_.size(); }
  [[nodiscard]] bool empty() const noexcept { return parent_.empty(); }

 private:
  std::unordered_map<std::string, std::string> parent_;
  std::vector<std::string> fields_;
};

/// Reads a header row followed by (subfield, field) rows.
[[nodiscard]] inline Taxonomy load_taxonomy(std::istream& in, csv::Format format = {}) {
  if (!in) throw IoError("taxonomy stream is not readable");
  Taxonomy taxonomy;
  csv::Reader reader(in, format);
  csv::Row row;
  bool header = true;
  while (reader.next(row)) {
    if (std::exchange(header, false)) continue;
    if (row.fields.size() != 2) {
      throw DataError("taxonomy line " + std::to_string(row.line) + ": expected 2 columns, found " +
                      std::to_string(row.fields.size()));
    }
    taxonomy.add(row.fields[0], row.fields[1]);
  }
  if (taxonomy.empty()) throw DataError("taxonomy file has no entries");
  return taxonomy;
}

}  // namespace fieldnet
