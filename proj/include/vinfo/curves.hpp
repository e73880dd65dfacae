#ifndef VINFO_CURVES_HPP
#define VINFO_CURVES_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vinfo/error.hpp"
#include "vinfo/estimator.hpp"
#include "vinfo/io/report.hpp"
#include "vinfo/io/text.hpp"

namespace vinfo {

/// Fixed-point decimal that remembers how many fractional digits it was
/// written with, so differences of table entries print exactly.
struct Decimal {
  std::int64_t scaled = 0;
  int scale = 0;

  static std::optional<Decimal> parse(std::string_view s) {
    s = io::trim(s);
    if (s.empty()) return std::nullopt;
    bool neg = false;
    if (s.front() == '-' || s.front() == '+') {
      neg = s.front() == '-';
      s.remove_prefix(1);
    }
    Decimal d;
    bool seen_dot = false, seen_digit = false;
    for (char c : s) {
      if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else if (c >= '0' && c <= '9') {
        if (d.scaled > (INT64_MAX - 9) / 10 || d.scale >= 15) return std::nullopt;
        d.scaled = d.scaled * 10 + (c - '0');
        if (seen_dot) ++d.scale;
        seen_digit = true;
      } else {
        return std::nullopt;
      }
    }
    if (!seen_digit) return std::nullopt;
    if (neg) d.scaled = -d.scaled;
    return d;
  }

  Decimal rescaled(int to) const {
    Decimal d = *this;
    while (d.scale < to) {
      d.scaled *= 10;
      ++d.scale;
    }
    return d;
  }

  friend Decimal operator-(const Decimal& a, const Decimal& b) {
    const int s = std::max(a.scale, b.scale);
    return Decimal{a.rescaled(s).scaled - b.rescaled(s).scaled, s};
  }

  std::string str() const {
    std::string digits = std::to_string(scaled < 0 ? -scaled : scaled);
    if (scale > 0) {
      if (digits.size() <= static_cast<std::size_t>(scale))
        digits.insert(0, static_cast<std::size_t>(scale) + 1 - digits.size(), '0');
      digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
    }
    return (scaled < 0 ? "-" : "") + digits;
  }
};

/// A V-entropy table: one row per probe, one column per task. Single-layer
/// rows are keyed "l"; two-layer rows "b-l" where b is the baseline layer.
struct VEntropyTable {
  bool two_layer = false;
  std::uint32_t baseline = 0;
  std::vector<std::string> tasks;
  std::map<std::uint32_t, std::vector<Decimal>> rows;
};

inline VEntropyTable parse_ventropy_table(std::string_view text, const std::string& source) {
  const auto lines = io::lines_of(text);
  if (lines.empty()) throw ParseError(source + ": empty table", 1);
  const auto header = io::split(lines[0], ',');
  if (header.size() < 2 || io::trim(header[0]) != "layer")
    throw ParseError(source + ": table header must start with 'layer'", 1);
  VEntropyTable t;
  for (std::size_t i = 1; i < header.size(); ++i) t.tasks.emplace_back(io::trim(header[i]));
  bool first = true;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    const auto f = io::split(lines[i], ',');
    if (f.size() != header.size()) throw ParseError(source + ": ragged table row", i + 1);
    const std::string id(io::trim(f[0]));
    const auto dash = id.find('-');
    const bool pair = dash != std::string::npos;
    if (first) t.two_layer = pair;
    if (pair != t.two_layer) throw ParseError(source + ": mixes single-layer and two-layer rows", i + 1);
    std::uint32_t layer = 0, base = 0;
    const bool ok = pair ? io::parse_int(std::string_view(id).substr(0, dash), base) &&
                               io::parse_int(std::string_view(id).substr(dash + 1), layer)
                         : io::parse_int(id, layer);
    if (!ok) throw ParseError(source + ": bad layer id '" + id + "'", i + 1);
    if (pair) {
      if (first) t.baseline = base;
      if (base != t.baseline) throw ParseError(source + ": rows condition on different baselines", i + 1);
    }
    first = false;
    std::vector<Decimal> values;
    for (std::size_t k = 1; k < f.size(); ++k) {
      auto d = Decimal::parse(f[k]);
      if (!d) throw ParseError(source + ": bad value '" + f[k] + "'", i + 1);
      values.push_back(*d);
    }
    if (!t.rows.emplace(layer, std::move(values)).second)
      throw ParseError(source + ": duplicate layer " + std::to_string(layer), i + 1);
  }
  if (t.rows.empty()) throw DataError(source + ": table has no rows");
  return t;
}

struct CurvePoint {
  std::string source;
  std::string task;
  std::uint32_t layer = 0;
  std::string series;  // "baselined" or "conditional"
  std::string bits;    // already formatted
};

/// Baselined curve from a single-layer table (row[base] - row[l]) and
/// conditional curve from a two-layer table (row[base-base] - row[base-l]).
inline std::vector<CurvePoint> curves_from_tables(const VEntropyTable* single, const VEntropyTable* pair,
                                                  const std::string& source, std::uint32_t baseline = 0) {
  std::vector<CurvePoint> out;
  auto emit = [&](const VEntropyTable& t, std::uint32_t base, const char* series) {
    auto base_row = t.rows.find(base);
    if (base_row == t.rows.end())
      throw MergeError(source + ": " + series + " table has no baseline row for layer " + std::to_string(base));
    for (std::size_t k = 0; k < t.tasks.size(); ++k)
      for (const auto& [layer, values] : t.rows) {
        if (layer == base) continue;
        out.push_back({source, t.tasks[k], layer, series, (base_row->second[k] - values[k]).str()});
      }
  };
  if (single) emit(*single, baseline, "baselined");
  if (pair) emit(*pair, pair->baseline, "conditional");
  if (single && pair) {
    std::set<std::uint32_t> a, b;
    for (const auto& [l, v] : single->rows)
      if (l != baseline) a.insert(l);
    for (const auto& [l, v] : pair->rows)
      if (l != pair->baseline) b.insert(l);
    if (a != b) throw MergeError(source + ": single-layer and two-layer tables cover different layers");
    if (single->tasks != pair->tasks) throw MergeError(source + ": single-layer and two-layer tables list different tasks");
  }
  return out;
}

/// Baselined and conditional values of a report, passed through unchanged.
inline std::vector<CurvePoint> curves_from_report(const ProbingReport& r, const std::string& source) {
  std::vector<CurvePoint> out;
  for (const LayerRecord& l : r.layers) {
    out.push_back({source, r.task, l.layer, "baselined", io::format_double(l.baselined_bits)});
    out.push_back({source, r.task, l.layer, "conditional", io::format_double(l.conditional_bits)});
  }
  return out;
}

/// Loads every input, classifies it by content, and merges the curves into
/// one long-format list. All sources must cover the same layer set.
inline std::vector<CurvePoint> build_curves(const std::vector<std::filesystem::path>& inputs,
                                            const std::string& task_filter = "") {
  if (inputs.empty()) throw ArgumentError("report-curves needs at least one input");
  std::vector<CurvePoint> points;
  std::optional<VEntropyTable> single, pair;
  std::string table_source;
  std::vector<std::pair<std::string, std::set<std::uint32_t>>> layer_sets;

  auto add_report = [&](const ProbingReport& r, const std::string& source) {
    std::set<std::uint32_t> layers;
    for (const LayerRecord& l : r.layers) layers.insert(l.layer);
    for (const LayerRecord& l : r.layers) {
      const double b = l.H_given_B - l.H_given_layer;
      const double c = l.H_given_B - l.H_given_B_and_layer;
      if (b != l.baselined_bits || c != l.conditional_bits)
        throw DataError(source + ": layer " + std::to_string(l.layer) +
                        " differences do not match its V-entropy fields");
    }
    layer_sets.emplace_back(source, std::move(layers));
    auto pts = curves_from_report(r, source);
    points.insert(points.end(), pts.begin(), pts.end());
  };

  for (const auto& path : inputs) {
    const std::string source = path.filename().string();
    const std::string text = io::read_file(path);
    const auto first_line = io::lines_of(text).empty() ? std::string_view{} : io::lines_of(text)[0];
    if (path.extension() == ".json") {
      add_report(io::read_report_json(path), source);
    } else if (io::split(first_line, ',') == io::report_csv_header()) {
      add_report(io::parse_report_csv(text, path.stem().string(), source), source);
    } else {
      VEntropyTable t = parse_ventropy_table(text, source);
      auto& slot = t.two_layer ? pair : single;
      if (slot) throw MergeError(source + ": more than one " + (t.two_layer ? "two-layer" : "single-layer") + " table");
      if (table_source.empty()) table_source = path.stem().string();
      slot = std::move(t);
    }
  }
  if (single || pair) {
    auto pts = curves_from_tables(single ? &*single : nullptr, pair ? &*pair : nullptr, table_source,
                                  pair ? pair->baseline : 0);
    std::set<std::uint32_t> layers;
    for (const auto& p : pts) layers.insert(p.layer);
    layer_sets.emplace_back(table_source, std::move(layers));
    points.insert(points.end(), pts.begin(), pts.end());
  }
  for (std::size_t i = 1; i < layer_sets.size(); ++i)
    if (layer_sets[i].second != layer_sets[0].second)
      throw MergeError("inconsistent layer sets: '" + layer_sets[i].first + "' vs '" + layer_sets[0].first + "'");

  if (!task_filter.empty()) {
    std::erase_if(points, [&](const CurvePoint& p) { return p.task != task_filter; });
    if (points.empty()) throw DataError("no curve values for task '" + task_filter + "'");
  }
  return points;
}

inline std::string format_curves_csv(const std::vector<CurvePoint>& points) {
  std::string out = "source,task,layer,series,bits\n";
  for (const auto& p : points)
    out += p.source + "," + p.task + "," + std::to_string(p.layer) + "," + p.series + "," + p.bits + "\n";
  return out;
}

}  // namespace vinfo

#endif  // VINFO_CURVES_HPP
