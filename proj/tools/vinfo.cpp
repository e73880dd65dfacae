// Command-line front end: estimate, synth, report-curves, selfcheck.
//
// Exit codes: 0 ok, 2 config/usage error, 3 data error, 4 numeric error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vinfo/curves.hpp"
#include "vinfo/estimator.hpp"
#include "vinfo/io/config.hpp"
#include "vinfo/io/labels.hpp"
#include "vinfo/io/repr_codec.hpp"
#include "vinfo/io/report.hpp"
#include "vinfo/io/split.hpp"
#include "vinfo/oracle.hpp"
#include "vinfo/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace vinfo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Numeric:
    case ErrorKind::Training: return kExitNumeric;
    default: return kExitData;
  }
}

std::size_t thread_cap() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VINFO_THREADS")) {
    std::size_t v = 0;
    if (!io::parse_int(std::string_view(env), v) || v == 0)
      throw ConfigError("VINFO_THREADS must be a positive integer, got '" + std::string(env) + "'");
    n = v;
  }
  return n;
}

struct EstimateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string eval_split;
  std::string out_dir;
};

int cmd_estimate(const EstimateArgs& args) {
  if (!fs::exists(args.config)) throw ConfigError("config file '" + args.config + "' does not exist");
  io::ExperimentConfig cfg = io::read_config(args.config);
  if (args.seed) cfg.train.seed = *args.seed;
  if (!args.eval_split.empty()) cfg.eval_split = io::parse_eval_split(args.eval_split);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;

  const RepresentationBundle bundle = io::read_repr(cfg.repr_path);
  LabeledDataset ds = io::read_labels(cfg.labels_path, cfg.granularity);
  check_consistency(ds, bundle);
  if (cfg.explicit_split()) {
    ds = io::attach_split(std::move(ds), io::read_index_file(cfg.train_split), io::read_index_file(cfg.dev_split),
                          cfg.test_split.empty() ? std::vector<std::size_t>{} : io::read_index_file(cfg.test_split));
  } else {
    ds = io::attach_split(std::move(ds), cfg.split_ratios, cfg.split_seed);
  }
  validate_split(ds);
  if (ds.num_classes() < 2) throw DataError("label file has fewer than 2 distinct labels");

  std::vector<std::uint32_t> layers = cfg.layers;
  if (layers.empty())
    for (std::uint32_t l = 1; l < bundle.n_layers; ++l) layers.push_back(l);
  if (layers.empty()) throw DataError("representations have no layers beyond the baseline");

  ExperimentOptions opt;
  opt.task = cfg.task;
  opt.architecture = cfg.architecture;
  opt.hidden_dim = cfg.hidden_dim;
  opt.placeholder = cfg.placeholder;
  opt.eval_split = cfg.eval_split;
  opt.metric = cfg.metric;
  opt.threads = thread_cap();

  ProbingReport report = run_experiment(ds, bundle, layers, cfg.train, opt);
  report.config = io::config_snapshot(cfg);
  report.config.erase("out_dir");

  fs::create_directories(cfg.out_dir);
  io::write_report_json(cfg.out_dir / "report.json", report);
  io::write_report_csv(cfg.out_dir / "report.csv", report);
  std::cout << io::format_report_table(report);
  std::cout << "wrote " << (cfg.out_dir / "report.json").string() << " and " << (cfg.out_dir / "report.csv").string()
            << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string scenario = "planted_ambiguity";
  std::string out_dir;
  std::uint64_t seed = 0;
  ScenarioSpec spec;
};

int cmd_synth(SynthArgs args) {
  args.spec.scenario = parse_scenario(args.scenario);
  args.spec.seed = args.seed;
  const SyntheticCorpus corpus = synth_generate(args.spec);
  const fs::path dir = args.out_dir;
  fs::create_directories(dir);
  io::write_repr(dir / "repr.vrep", corpus.bundle);
  io::write_labels(dir / "labels.tsv", corpus.dataset);
  io::write_index_file(dir / "train.idx", corpus.dataset.split.train);
  io::write_index_file(dir / "dev.idx", corpus.dataset.split.dev);
  io::write_index_file(dir / "test.idx", corpus.dataset.split.test);

  io::ExperimentConfig cfg;
  cfg.repr_path = "repr.vrep";
  cfg.labels_path = "labels.tsv";
  cfg.task = args.scenario;
  cfg.train_split = "train.idx";
  cfg.dev_split = "dev.idx";
  if (!corpus.dataset.split.test.empty()) cfg.test_split = "test.idx";
  cfg.out_dir = "out";
  cfg.train.seed = args.seed;
  io::write_config(dir / "experiment.cfg", cfg);
  std::cout << "wrote " << corpus.dataset.sentences.size() << " sentences, " << corpus.bundle.n_layers
            << " layers of dim " << corpus.bundle.dim << " to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_report_curves(const std::vector<std::string>& from, const std::string& task, const std::string& out) {
  std::vector<fs::path> inputs(from.begin(), from.end());
  const std::string csv = format_curves_csv(build_curves(inputs, task));
  if (out.empty()) {
    std::cout << csv;
  } else {
    io::write_file(out, csv);
  }
  return kExitOk;
}

int cmd_selfcheck(std::uint64_t seed) {
  bool all = true;
  for (const CheckResult& r : run_selfcheck(seed)) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    all = all && r.passed;
  }
  std::cout << (all ? "selfcheck passed\n" : "selfcheck FAILED\n");
  return all ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Usable-information probing toolkit"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Train baselined and conditional probes for each layer");
  estimate->add_option("--config", est.config, "Experiment config file")->required();
  estimate->add_option("--seed", est.seed, "Override the training seed");
  estimate->add_option("--eval-split", est.eval_split, "dev or test")->check(CLI::IsMember({"dev", "test"}));
  estimate->add_option("--out-dir", est.out_dir, "Override the output directory");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Write a synthetic scenario as .vrep, labels, splits and config");
  synth->add_option("--scenario", syn.scenario, "tabular | independence | self_condition | planted_ambiguity")
      ->check(CLI::IsMember({"tabular", "independence", "self_condition", "planted_ambiguity"}));
  synth->add_option("--out-dir", syn.out_dir, "Directory to write into")->required();
  synth->add_option("--seed", syn.seed, "Generator seed");
  synth->add_option("--vocab", syn.spec.vocab, "Word types");
  synth->add_option("--classes", syn.spec.classes, "Label classes");
  synth->add_option("--n-train", syn.spec.n_train, "Train words");
  synth->add_option("--n-dev", syn.spec.n_dev, "Dev words");
  synth->add_option("--n-test", syn.spec.n_test, "Test words");
  synth->add_option("--sentence-length", syn.spec.sentence_length, "Words per sentence");
  synth->add_option("--ambiguity-rate", syn.spec.ambiguity_rate, "Planted ambiguity rate");

  std::vector<std::string> from;
  std::string task, curves_out;
  auto* curves = app.add_subcommand("report-curves", "Merge reports or V-entropy tables into per-layer curves");
  curves->add_option("--from", from, "Report files (.json/.csv) or V-entropy table CSVs")->required();
  curves->add_option("--task", task, "Keep only this task");
  curves->add_option("--out", curves_out, "Output CSV (stdout when omitted)");

  std::uint64_t check_seed = 0;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the oracle and property checks");
  selfcheck->add_option("--seed", check_seed, "Seed for the checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*estimate) return cmd_estimate(est);
    if (*synth) return cmd_synth(syn);
    if (*curves) return cmd_report_curves(from, task, curves_out);
    if (*selfcheck) return cmd_selfcheck(check_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
