#ifndef VINFO_SELFCHECK_HPP
#define VINFO_SELFCHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vinfo/estimator.hpp"
#include "vinfo/oracle.hpp"
#include "vinfo/probes.hpp"
#include "vinfo/trainer.hpp"

// Reduced-size oracle and property checks that a user can run against an
// installed build. The full-size versions live in the acceptance suite.
namespace vinfo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all
/// parameters, with numeric gradients from central differences of the
/// forward-pass NLL.
inline double max_gradient_relative_error(const ProbeParams& params, std::span<const LabeledInput> batch,
                                          double step = 1e-5, double floor = 1e-6) {
  const LossAndGradient lg = loss_and_gradient(params, batch);
  auto loss = [&](const ProbeParams& p) {
    double total = 0.0;
    for (const auto& ex : batch) total -= std::log(forward(p, ex.input).probs[ex.label]);
    return total / static_cast<double>(batch.size());
  };
  ProbeParams probe = params;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = probe.theta()[i];
    probe.theta()[i] = orig + step;
    const double up = loss(probe);
    probe.theta()[i] = orig - step;
    const double down = loss(probe);
    probe.theta()[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = lg.grads.theta()[i];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline ExampleTable scenario_table(const SyntheticCorpus& c, std::vector<std::uint32_t> layers) {
  return build_examples(c.dataset, c.bundle, layers);
}

}  // namespace detail

inline std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 0) {
  std::vector<CheckResult> out;
  TrainConfig cfg;
  cfg.seed = seed;

  {
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      PredictiveFamilySpec fam = trial % 2 ? mlp_family({3, 2}, 4, 3) : affine_family({3, 2}, 3);
      ProbeParams p = init_params(fam, seed + static_cast<std::uint64_t>(trial));
      for (double& v : p.theta()) v = rng.normal();
      std::vector<std::vector<double>> xs(6, std::vector<double>(5));
      std::vector<LabeledInput> batch;
      for (auto& x : xs) {
        for (double& v : x) v = rng.normal();
        batch.push_back({x, rng.below(3)});
      }
      worst = std::max(worst, max_gradient_relative_error(p, batch));
    }
    out.push_back({"gradients match central differences", worst < 1e-4, "max rel err " + std::to_string(worst)});
  }

  ScenarioSpec small;
  small.n_train = 2048;
  small.n_dev = 2048;
  small.seed = seed;

  {
    const SyntheticCorpus c = synth_generate(small);
    const ExampleTable t = detail::scenario_table(c, {0});
    const auto fam = affine_family({t.slot_dims[0]}, t.num_classes);
    const VEntropyEstimate h = estimate_v_entropy(t, fam, KnownSetSpec::of(fam, {0}), cfg);
    const double oracle_tr = empirical_conditional_entropy(joint_from_one_hot(t, t.train), {0});
    const double oracle_dev = empirical_conditional_entropy(joint_from_one_hot(t, t.dev), {0});
    const bool ok = std::abs(h.train_bits - oracle_tr) < 0.02 && std::abs(h.bits - oracle_dev) < 0.05;
    out.push_back({"tabular probe matches counting oracle", ok,
                   "train " + detail::fmt(h.train_bits) + " vs " + detail::fmt(oracle_tr) + ", dev " +
                       detail::fmt(h.bits) + " vs " + detail::fmt(oracle_dev)});

    const VEntropyEstimate m = estimate_v_entropy(t, fam, KnownSetSpec::of(fam, {}), cfg);
    const double h_y = empirical_conditional_entropy(joint_from_one_hot(t, t.dev), {});
    out.push_back({"marginal probe matches label entropy", std::abs(m.bits - h_y) < 0.02,
                   detail::fmt(m.bits) + " vs " + detail::fmt(h_y)});

    const auto masked = zero_masked_family(affine_family({t.slot_dims[0]}, t.num_classes), std::vector<std::size_t>{0, 1});
    const VEntropyEstimate hs = estimate_v_entropy(t, masked, KnownSetSpec::of(masked, {0}), cfg);
    out.push_back({"monotonicity under a masked sub-family", h.bits <= hs.bits + 0.02,
                   "larger " + detail::fmt(h.bits) + ", smaller " + detail::fmt(hs.bits)});
  }

  for (Scenario sc : {Scenario::Independence, Scenario::SelfCondition}) {
    ScenarioSpec spec = small;
    spec.scenario = sc;
    const SyntheticCorpus c = synth_generate(spec);
    const std::uint32_t layers[] = {1};
    const ProbingReport r = run_experiment(c.dataset, c.bundle, layers, cfg, {});
    const double cond = r.layers[0].conditional_bits;
    const double tol = sc == Scenario::Independence ? 0.03 : 0.02;
    out.push_back({std::string("conditional bits near zero (") + to_string(sc) + ")", std::abs(cond) <= tol,
                   "conditional " + detail::fmt(cond)});
  }

  {
    ScenarioSpec spec;
    spec.scenario = Scenario::PlantedAmbiguity;
    spec.vocab = 16;
    spec.n_train = 4096;
    spec.n_dev = 1024;
    spec.n_test = 1024;
    spec.seed = seed;
    const SyntheticCorpus c = synth_generate(spec);
    const std::uint32_t layers[] = {2};
    const ProbingReport r = run_experiment(c.dataset, c.bundle, layers, cfg, {});
    const LayerRecord& l = r.layers[0];
    out.push_back({"planted ambiguity sign pattern", l.baselined_bits < 0.0 && l.conditional_bits > 0.1,
                   "baselined " + detail::fmt(l.baselined_bits) + ", conditional " + detail::fmt(l.conditional_bits)});
    out.push_back({"conditional bits non-negative (planted)", l.conditional_bits >= -0.02,
                   "conditional " + detail::fmt(l.conditional_bits)});
  }
  return out;
}

}  // namespace vinfo

#endif  // VINFO_SELFCHECK_HPP
