#ifndef VINFO_IO_CONFIG_HPP
#define VINFO_IO_CONFIG_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/estimator.hpp"
#include "vinfo/io/split.hpp"
#include "vinfo/io/text.hpp"
#include "vinfo/trainer.hpp"

// Experiment configs are flat "key = value" files. '#' starts a comment.
// Relative paths resolve against the directory holding the config file.
//
//   repr          representation file (.vrep)              required
//   labels        label file                               required
//   task          name used in reports                     default "task"
//   granularity   word | sentence                          default word
//   layers        comma separated layer ids, or "all"      default all (1..n-1)
//   architecture  affine_softmax | one_hidden_layer        default affine_softmax
//   hidden_dim    hidden width for one_hidden_layer        default 16
//   placeholder   constant fed to unknown slots            default 0
//   metric        accuracy | span_f1                       default accuracy
//   eval_split    dev | test                               default dev
//   out_dir       where reports are written                default "."
//   split         train,dev,test ratios                    default 0.8,0.1,0.1
//   split_seed    seed for the ratio split                 default 0
//   train_split / dev_split / test_split   index files replacing `split`
//   lr0 lr_decay batch_size max_epochs min_lr adam_beta1 adam_beta2 adam_eps seed
namespace vinfo::io {

struct ExperimentConfig {
  std::filesystem::path repr_path;
  std::filesystem::path labels_path;
  std::string task = "task";
  Granularity granularity = Granularity::Word;
  std::vector<std::uint32_t> layers;  // empty = every non-baseline layer
  Architecture architecture = Architecture::AffineSoftmax;
  std::size_t hidden_dim = 16;
  double placeholder = 0.0;
  Metric metric = Metric::Accuracy;
  EvalSplit eval_split = EvalSplit::Dev;
  std::filesystem::path out_dir = ".";
  SplitRatios split_ratios;
  std::uint64_t split_seed = 0;
  std::filesystem::path train_split, dev_split, test_split;
  TrainConfig train;

  bool explicit_split() const { return !train_split.empty(); }
  bool operator==(const ExperimentConfig&) const = default;
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "repr",       "labels",     "task",       "granularity", "layers",      "architecture", "hidden_dim",
      "placeholder", "metric",    "eval_split", "out_dir",     "split",       "split_seed",   "train_split",
      "dev_split",  "test_split", "lr0",        "lr_decay",    "batch_size",  "max_epochs",   "min_lr",
      "adam_beta1", "adam_beta2", "adam_eps",   "seed"};
  return keys;
}

namespace detail {

inline std::string join_keys() {
  std::string out;
  for (const auto& k : config_keys()) out += (out.empty() ? "" : ", ") + k;
  return out;
}

inline double to_double(const std::string& key, std::string_view v) {
  double d = 0.0;
  if (!parse_double(v, d)) throw ConfigError("config key '" + key + "' expects a number, got '" + std::string(v) + "'");
  return d;
}

template <typename Int>
Int to_int(const std::string& key, std::string_view v) {
  Int i = 0;
  if (!parse_int(v, i)) throw ConfigError("config key '" + key + "' expects an integer, got '" + std::string(v) + "'");
  return i;
}

}  // namespace detail

inline EvalSplit parse_eval_split(std::string_view v) {
  if (v == "dev") return EvalSplit::Dev;
  if (v == "test") return EvalSplit::Test;
  throw ConfigError("eval_split must be dev or test, got '" + std::string(v) + "'");
}

/// Applies one key to `cfg`; paths are resolved against `base`.
inline void apply_config_value(ExperimentConfig& cfg, const std::string& key, std::string_view value,
                               const std::filesystem::path& base) {
  using detail::to_double;
  auto path = [&](std::string_view v) {
    std::filesystem::path p(v);
    return p.is_absolute() || base.empty() ? p : base / p;
  };
  const std::string v(value);
  if (key == "repr") cfg.repr_path = path(v);
  else if (key == "labels") cfg.labels_path = path(v);
  else if (key == "task") cfg.task = v;
  else if (key == "granularity") {
    if (v == "word") cfg.granularity = Granularity::Word;
    else if (v == "sentence") cfg.granularity = Granularity::Sentence;
    else throw ConfigError("granularity must be word or sentence, got '" + v + "'");
  } else if (key == "layers") {
    cfg.layers.clear();
    if (v != "all")
      for (const auto& tok : split(v, ','))
        cfg.layers.push_back(detail::to_int<std::uint32_t>(key, trim(tok)));
  } else if (key == "architecture") {
    if (v == "affine_softmax") cfg.architecture = Architecture::AffineSoftmax;
    else if (v == "one_hidden_layer") cfg.architecture = Architecture::OneHiddenLayer;
    else throw ConfigError("architecture must be affine_softmax or one_hidden_layer, got '" + v + "'");
  } else if (key == "hidden_dim") cfg.hidden_dim = detail::to_int<std::size_t>(key, v);
  else if (key == "placeholder") cfg.placeholder = to_double(key, v);
  else if (key == "metric") {
    if (v == "accuracy") cfg.metric = Metric::Accuracy;
    else if (v == "span_f1") cfg.metric = Metric::SpanF1;
    else throw ConfigError("metric must be accuracy or span_f1, got '" + v + "'");
  } else if (key == "eval_split") cfg.eval_split = parse_eval_split(v);
  else if (key == "out_dir") cfg.out_dir = path(v);
  else if (key == "split") {
    const auto parts = split(v, ',');
    if (parts.size() != 3) throw ConfigError("split expects three comma separated ratios");
    cfg.split_ratios = {to_double(key, trim(parts[0])), to_double(key, trim(parts[1])), to_double(key, trim(parts[2]))};
  } else if (key == "split_seed") cfg.split_seed = detail::to_int<std::uint64_t>(key, v);
  else if (key == "train_split") cfg.train_split = path(v);
  else if (key == "dev_split") cfg.dev_split = path(v);
  else if (key == "test_split") cfg.test_split = path(v);
  else if (key == "lr0") cfg.train.lr0 = to_double(key, v);
  else if (key == "lr_decay") cfg.train.lr_decay = to_double(key, v);
  else if (key == "batch_size") cfg.train.batch_size = detail::to_int<std::size_t>(key, v);
  else if (key == "max_epochs") cfg.train.max_epochs = detail::to_int<std::size_t>(key, v);
  else if (key == "min_lr") cfg.train.min_lr = to_double(key, v);
  else if (key == "adam_beta1") cfg.train.adam_beta1 = to_double(key, v);
  else if (key == "adam_beta2") cfg.train.adam_beta2 = to_double(key, v);
  else if (key == "adam_eps") cfg.train.adam_eps = to_double(key, v);
  else if (key == "seed") cfg.train.seed = detail::to_int<std::uint64_t>(key, v);
  else throw ConfigError("unknown config key '" + key + "'; valid keys: " + detail::join_keys());
}

inline ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base = {}) {
  ExperimentConfig cfg;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(i + 1) + " is not 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    apply_config_value(cfg, key, trim(line.substr(eq + 1)), base);
  }
  if (cfg.repr_path.empty()) throw ConfigError("config is missing required key 'repr'");
  if (cfg.labels_path.empty()) throw ConfigError("config is missing required key 'labels'");
  if (cfg.architecture == Architecture::OneHiddenLayer && cfg.hidden_dim < 1)
    throw ConfigError("hidden_dim must be >= 1");
  const bool any_explicit = !cfg.train_split.empty() || !cfg.dev_split.empty() || !cfg.test_split.empty();
  if (any_explicit && (cfg.train_split.empty() || cfg.dev_split.empty()))
    throw ConfigError("explicit splits need at least train_split and dev_split");
  try {
    cfg.train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid training settings: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig read_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

/// Flat snapshot of every setting, as written into configs and reports.
inline std::map<std::string, std::string> config_snapshot(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  std::string layers;
  for (std::uint32_t l : cfg.layers) layers += (layers.empty() ? "" : ",") + std::to_string(l);
  kv["repr"] = cfg.repr_path.generic_string();
  kv["labels"] = cfg.labels_path.generic_string();
  kv["task"] = cfg.task;
  kv["granularity"] = to_string(cfg.granularity);
  kv["layers"] = layers.empty() ? "all" : layers;
  kv["architecture"] = to_string(cfg.architecture);
  kv["hidden_dim"] = std::to_string(cfg.hidden_dim);
  kv["placeholder"] = format_double(cfg.placeholder);
  kv["metric"] = to_string(cfg.metric);
  kv["eval_split"] = to_string(cfg.eval_split);
  kv["out_dir"] = cfg.out_dir.generic_string();
  if (cfg.explicit_split()) {
    kv["train_split"] = cfg.train_split.generic_string();
    kv["dev_split"] = cfg.dev_split.generic_string();
    if (!cfg.test_split.empty()) kv["test_split"] = cfg.test_split.generic_string();
  } else {
    kv["split"] = format_double(cfg.split_ratios.train) + "," + format_double(cfg.split_ratios.dev) + "," +
                  format_double(cfg.split_ratios.test);
    kv["split_seed"] = std::to_string(cfg.split_seed);
  }
  kv["lr0"] = format_double(cfg.train.lr0);
  kv["lr_decay"] = format_double(cfg.train.lr_decay);
  kv["batch_size"] = std::to_string(cfg.train.batch_size);
  kv["max_epochs"] = std::to_string(cfg.train.max_epochs);
  kv["min_lr"] = format_double(cfg.train.min_lr);
  kv["adam_beta1"] = format_double(cfg.train.adam_beta1);
  kv["adam_beta2"] = format_double(cfg.train.adam_beta2);
  kv["adam_eps"] = format_double(cfg.train.adam_eps);
  kv["seed"] = std::to_string(cfg.train.seed);
  return kv;
}

inline std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  const auto kv = config_snapshot(cfg);
  for (const auto& key : config_keys()) {
    if (auto it = kv.find(key); it != kv.end()) out += key + " = " + it->second + '\n';
  }
  return out;
}

inline void write_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  write_file(path, format_config(cfg));
}

}  // namespace vinfo::io

#endif  // VINFO_IO_CONFIG_HPP
