#ifndef VINFO_ESTIMATOR_HPP
#define VINFO_ESTIMATOR_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/metrics.hpp"
#include "vinfo/probes.hpp"
#include "vinfo/trainer.hpp"

namespace vinfo {

struct VInfoEstimate {
  double bits = 0.0;
  std::vector<std::size_t> source;       // slots that became known
  std::vector<std::size_t> conditioning; // slots known in both estimates
};

namespace detail {

inline void require_comparable(const VEntropyEstimate& a, const VEntropyEstimate& b) {
  if (!(a.family == b.family)) throw CompositionError("estimates come from different predictive families");
  if (!(a.config == b.config)) throw CompositionError("estimates come from different training configs");
  if (a.eval_split != b.eval_split) throw CompositionError("estimates were evaluated on different splits");
}

}  // namespace detail

/// I_V(source -> Y | C) = H_V(Y | C) - H_V(Y | C and source), where
/// `h_without` conditions on C and `h_with` on a superset of it.
inline VInfoEstimate v_information(const VEntropyEstimate& h_without, const VEntropyEstimate& h_with) {
  detail::require_comparable(h_without, h_with);
  if (!h_without.known.subset_of(h_with.known))
    throw CompositionError("conditioning set of the second estimate must contain the first");
  VInfoEstimate out;
  out.bits = h_without.bits - h_with.bits;
  for (std::size_t s = 0; s < h_with.known.known.size(); ++s) {
    if (h_without.known.is_known(s))
      out.conditioning.push_back(s);
    else if (h_with.known.is_known(s))
      out.source.push_back(s);
  }
  return out;
}

/// H_V(Y | B) - H_V(Y | phi): how much more accessible the label is from the
/// representation than from the baseline. Negative values are kept.
inline double baselined_probing(const VEntropyEstimate& perf_phi, const VEntropyEstimate& perf_B) {
  detail::require_comparable(perf_phi, perf_B);
  if (perf_phi.known.known_slots().size() != 1 || perf_B.known.known_slots().size() != 1)
    throw CompositionError("baselined probing compares probes that each observe exactly one slot");
  return perf_B.bits - perf_phi.bits;
}

/// H_V(Y | B) - H_V(Y | B, phi) from a [B; phi] probe and a [B; placeholder]
/// probe over the same two-slot family; estimates I_V(phi -> Y | B).
inline double conditional_probing(const VEntropyEstimate& perf_B_phi, const VEntropyEstimate& perf_B_0) {
  if (perf_B_phi.family.num_slots() != 2) throw CompositionError("conditional probing needs a two-slot family");
  detail::require_comparable(perf_B_phi, perf_B_0);
  const std::vector<std::size_t> both{0, 1};
  const std::vector<std::size_t> base{0};
  if (perf_B_phi.known.known_slots() != both || perf_B_0.known.known_slots() != base)
    throw CompositionError("conditional probing expects known sets {B, phi} and {B}");
  return perf_B_0.bits - perf_B_phi.bits;
}

struct LayerRecord {
  std::uint32_t layer = 0;
  double H_given_B = 0.0;
  double H_given_B_and_layer = 0.0;
  double H_given_layer = 0.0;
  double H_marginal = 0.0;
  double baselined_bits = 0.0;
  double conditional_bits = 0.0;
  double v_info_bits = 0.0;
  double task_metric = 0.0;
  bool operator==(const LayerRecord&) const = default;
};

struct ProbingReport {
  std::string task;
  std::string metric;
  std::string eval_split = "dev";
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<LayerRecord> layers;
  bool operator==(const ProbingReport&) const = default;
};

enum class Metric { Accuracy, SpanF1 };

inline const char* to_string(Metric m) { return m == Metric::Accuracy ? "accuracy" : "span_f1"; }

struct ExperimentOptions {
  std::string task = "task";
  Architecture architecture = Architecture::AffineSoftmax;
  std::size_t hidden_dim = 0;
  double placeholder = 0.0;
  EvalSplit eval_split = EvalSplit::Dev;
  Metric metric = Metric::Accuracy;
  std::size_t threads = 1;
};

namespace detail {

inline double task_metric(const LabeledDataset& ds, const ExampleTable& table, const VEntropyEstimate& est,
                          Metric metric) {
  const auto& rows = table.part(part_of(est.eval_split));
  if (metric == Metric::Accuracy) return est.accuracy;
  // Regroup the flat predictions by sentence, in evaluation order.
  std::vector<SpanSet> pred, gold;
  std::vector<std::string> p_tags, g_tags;
  std::size_t current = SIZE_MAX;
  auto flush = [&] {
    if (current == SIZE_MAX) return;
    pred.push_back(bio_decode(p_tags));
    gold.push_back(bio_decode(g_tags));
    p_tags.clear();
    g_tags.clear();
  };
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t s = table.sentence_of[rows[k]];
    if (s != current) {
      flush();
      current = s;
    }
    p_tags.push_back(ds.vocab[est.predictions[k]]);
    g_tags.push_back(ds.vocab[table.labels[rows[k]]]);
  }
  flush();
  return span_f1(pred, gold).f1;
}

inline LayerRecord run_layer(const LabeledDataset& ds, const RepresentationBundle& bundle, std::uint32_t layer,
                             const TrainConfig& cfg, const ExperimentOptions& opt) {
  const std::uint32_t slot_layers[2] = {0, layer};
  const ExampleTable table = build_examples(ds, bundle, slot_layers);
  PredictiveFamilySpec family;
  family.architecture = opt.architecture;
  family.hidden_dim = opt.hidden_dim;
  family.slot_dims = {bundle.dim, bundle.dim};
  family.num_classes = ds.num_classes();
  family.validate();

  auto run = [&](std::initializer_list<std::size_t> known) {
    return estimate_v_entropy(table, family, KnownSetSpec::of(family, known, opt.placeholder), cfg, opt.eval_split);
  };
  const VEntropyEstimate b_phi = run({0, 1});
  const VEntropyEstimate b_0 = run({0});
  const VEntropyEstimate phi = run({1});
  const VEntropyEstimate none = run({});

  LayerRecord r;
  r.layer = layer;
  r.H_given_B = b_0.bits;
  r.H_given_B_and_layer = b_phi.bits;
  r.H_given_layer = phi.bits;
  r.H_marginal = none.bits;
  r.baselined_bits = baselined_probing(phi, b_0);
  r.conditional_bits = conditional_probing(b_phi, b_0);
  r.v_info_bits = v_information(none, phi).bits;
  r.task_metric = task_metric(ds, table, b_phi, opt.metric);
  return r;
}

}  // namespace detail

/// Trains the four probes [B;phi], [B;0], [0;phi], [0;0] for each requested
/// layer (all with the same seed and config) and assembles the report.
/// Layers run on up to `opt.threads` workers; results do not depend on it.
inline ProbingReport run_experiment(const LabeledDataset& ds, const RepresentationBundle& bundle,
                                    std::span<const std::uint32_t> layers, const TrainConfig& cfg,
                                    const ExperimentOptions& opt) {
  cfg.validate();
  for (std::uint32_t l : layers)
    if (l >= bundle.n_layers)
      throw DataError("layer " + std::to_string(l) + " requested but the representations have " +
                      std::to_string(bundle.n_layers) + " layers");
  check_consistency(ds, bundle);
  validate_split(ds);

  ProbingReport report;
  report.task = opt.task;
  report.metric = to_string(opt.metric);
  report.eval_split = to_string(opt.eval_split);
  report.seed = cfg.seed;
  report.layers.resize(layers.size());

  std::vector<std::exception_ptr> errors(layers.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < layers.size(); i = next++) {
      const std::string where = "layer " + std::to_string(layers[i]) + ": ";
      try {
        report.layers[i] = detail::run_layer(ds, bundle, layers[i], cfg, opt);
      } catch (const TrainingError& e) {
        errors[i] = std::make_exception_ptr(TrainingError(where + e.what(), e.history()));
      } catch (const NumericError& e) {
        errors[i] = std::make_exception_ptr(NumericError(where + e.what()));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(opt.threads, 1, std::max<std::size_t>(1, layers.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

}  // namespace vinfo

#endif  // VINFO_ESTIMATOR_HPP
