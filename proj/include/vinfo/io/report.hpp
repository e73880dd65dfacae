#ifndef VINFO_IO_REPORT_HPP
#define VINFO_IO_REPORT_HPP

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vinfo/error.hpp"
#include "vinfo/estimator.hpp"
#include "vinfo/io/text.hpp"

namespace vinfo::io {

inline const std::vector<std::string>& report_csv_header() {
  static const std::vector<std::string> header = {"layer",      "H_given_B",   "H_given_B_and_layer", "H_given_layer",
                                                  "H_marginal", "baselined",   "conditional",         "v_info",
                                                  "metric"};
  return header;
}

inline nlohmann::ordered_json report_to_json(const ProbingReport& r) {
  nlohmann::ordered_json j;
  j["task"] = r.task;
  j["metric"] = r.metric;
  j["eval_split"] = r.eval_split;
  j["seed"] = r.seed;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  j["layers"] = nlohmann::ordered_json::array();
  for (const LayerRecord& l : r.layers) {
    j["layers"].push_back({{"layer", l.layer},
                           {"H_given_B", l.H_given_B},
                           {"H_given_B_and_layer", l.H_given_B_and_layer},
                           {"H_given_layer", l.H_given_layer},
                           {"H_marginal", l.H_marginal},
                           {"baselined_bits", l.baselined_bits},
                           {"conditional_bits", l.conditional_bits},
                           {"v_info_bits", l.v_info_bits},
                           {"task_metric", l.task_metric}});
  }
  return j;
}

inline ProbingReport report_from_json(const nlohmann::json& j) {
  try {
    ProbingReport r;
    r.task = j.at("task").get<std::string>();
    r.metric = j.at("metric").get<std::string>();
    r.eval_split = j.at("eval_split").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) r.config[k] = v.get<std::string>();
    for (const auto& l : j.at("layers")) {
      LayerRecord rec;
      rec.layer = l.at("layer").get<std::uint32_t>();
      rec.H_given_B = l.at("H_given_B").get<double>();
      rec.H_given_B_and_layer = l.at("H_given_B_and_layer").get<double>();
      rec.H_given_layer = l.at("H_given_layer").get<double>();
      rec.H_marginal = l.at("H_marginal").get<double>();
      rec.baselined_bits = l.at("baselined_bits").get<double>();
      rec.conditional_bits = l.at("conditional_bits").get<double>();
      rec.v_info_bits = l.at("v_info_bits").get<double>();
      rec.task_metric = l.at("task_metric").get<double>();
      r.layers.push_back(rec);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

inline void write_report_json(const std::filesystem::path& path, const ProbingReport& r) {
  write_file(path, report_to_json(r).dump(2) + "\n");
}

inline ProbingReport read_report_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what(), e.byte);
  }
  return report_from_json(j);
}

inline std::string format_report_csv(const ProbingReport& r) {
  std::string out;
  for (const auto& h : report_csv_header()) out += (out.empty() ? "" : ",") + h;
  out += '\n';
  for (const LayerRecord& l : r.layers) {
    out += std::to_string(l.layer);
    for (double v : {l.H_given_B, l.H_given_B_and_layer, l.H_given_layer, l.H_marginal, l.baselined_bits,
                     l.conditional_bits, l.v_info_bits, l.task_metric})
      out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

inline void write_report_csv(const std::filesystem::path& path, const ProbingReport& r) {
  write_file(path, format_report_csv(r));
}

/// Reads the per-layer records back from a CSV report. Task and config are
/// not part of the CSV; the task is taken from `task`.
inline ProbingReport parse_report_csv(std::string_view text, const std::string& task, const std::string& source = "") {
  const auto lines = lines_of(text);
  if (lines.empty() || split(lines[0], ',') != report_csv_header())
    throw ParseError(source + ": not a report CSV (unexpected header)", 1);
  ProbingReport r;
  r.task = task;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != report_csv_header().size()) throw ParseError(source + ": ragged report row", i + 1);
    LayerRecord l;
    double* fields[] = {&l.H_given_B,      &l.H_given_B_and_layer, &l.H_given_layer, &l.H_marginal,
                        &l.baselined_bits, &l.conditional_bits,    &l.v_info_bits,   &l.task_metric};
    if (!parse_int(f[0], l.layer)) throw ParseError(source + ": bad layer id '" + f[0] + "'", i + 1);
    for (std::size_t k = 0; k < 8; ++k)
      if (!parse_double(f[k + 1], *fields[k])) throw ParseError(source + ": bad number '" + f[k + 1] + "'", i + 1);
    r.layers.push_back(l);
  }
  return r;
}

/// Human-readable summary: one row for the task, Baselined and Conditional
/// column groups with one column per layer.
inline std::string format_report_table(const ProbingReport& r) {
  const int w = 9;
  const int task_w = static_cast<int>(std::max<std::size_t>(r.task.size(), 4)) + 2;
  char buf[256];
  std::string head1(static_cast<std::size_t>(task_w), ' '), head2 = "task", row = r.task;
  head2.resize(static_cast<std::size_t>(task_w), ' ');
  row.resize(static_cast<std::size_t>(task_w), ' ');
  auto group = [&](const char* title, auto value) {
    const int span = std::max(static_cast<int>(w * r.layers.size()), static_cast<int>(std::strlen(title)) + 1);
    std::snprintf(buf, sizeof(buf), "| %-*s", span, title);
    head1 += buf;
    head2 += "| ";
    row += "| ";
    for (const LayerRecord& l : r.layers) {
      std::snprintf(buf, sizeof(buf), "%-*s", w, ("phi_" + std::to_string(l.layer)).c_str());
      head2 += buf;
      std::snprintf(buf, sizeof(buf), "%-*.3f", w, value(l));
      row += buf;
    }
    if (const int pad = span - w * static_cast<int>(r.layers.size()); pad > 0) {
      head2.append(static_cast<std::size_t>(pad), ' ');
      row.append(static_cast<std::size_t>(pad), ' ');
    }
  };
  group("Baselined", [](const LayerRecord& l) { return l.baselined_bits; });
  group("Conditional", [](const LayerRecord& l) { return l.conditional_bits; });
  return "Results on " + r.task + ", reported in bits of V-information (eval split: " + r.eval_split + ")\n" + head1 +
         "\n" + head2 + "\n" + row + "\n";
}

}  // namespace vinfo::io

#endif  // VINFO_IO_REPORT_HPP
