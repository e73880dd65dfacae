// Acceptance gate. Each criterion prints one PASS/FAIL line with the measured
// values; the exit status is non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "../test_support.hpp"
#include "vinfo/vinfo.hpp"

namespace fs = std::filesystem;
using namespace vinfo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

ExampleTable table_for(const SyntheticCorpus& c, std::vector<std::uint32_t> layers) {
  return build_examples(c.dataset, c.bundle, layers);
}

ScenarioSpec scenario(Scenario sc, std::uint64_t seed) {
  ScenarioSpec s;
  s.scenario = sc;
  s.seed = seed;
  if (sc == Scenario::PlantedAmbiguity) {
    s.vocab = 16;
    s.n_train = 4096;
    s.n_dev = 1024;
    s.n_test = 1024;
  }
  return s;
}

// Conditional bits of layer 1 (2 for planted) against the layer-0 baseline,
// computed once per (scenario, seed) and shared by several criteria.
double conditional_bits(Scenario sc, std::uint64_t seed) {
  struct Key {
    Scenario sc;
    std::uint64_t seed;
    double v;
  };
  static std::vector<Key> cache;
  for (const Key& k : cache)
    if (k.sc == sc && k.seed == seed) return k.v;
  const SyntheticCorpus c = synth_generate(scenario(sc, seed));
  const std::uint32_t layer[] = {sc == Scenario::PlantedAmbiguity ? 2u : 1u};
  TrainConfig cfg;
  cfg.seed = seed;
  const double v = run_experiment(c.dataset, c.bundle, layer, cfg, {}).layers[0].conditional_bits;
  cache.push_back({sc, seed, v});
  return v;
}

Outcome tabular_oracle() {
  ScenarioSpec spec;  // |X|=8, |Y|=4, 4096 train / 4096 dev
  const auto t0 = std::chrono::steady_clock::now();
  const SyntheticCorpus c = synth_generate(spec);
  const ExampleTable t = table_for(c, {0});
  const auto fam = affine_family({t.slot_dims[0]}, t.num_classes);
  const VEntropyEstimate h = estimate_v_entropy(t, fam, KnownSetSpec::of(fam, {0}), TrainConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double o_tr = empirical_conditional_entropy(joint_from_one_hot(t, t.train), {0});
  const double o_dev = empirical_conditional_entropy(joint_from_one_hot(t, t.dev), {0});
  const double e_tr = std::abs(h.train_bits - o_tr), e_dev = std::abs(h.bits - o_dev);
  return {e_tr < 0.02 && e_dev < 0.05 && secs < 30.0,
          "train err " + fmt(e_tr) + " (<0.02), dev err " + fmt(e_dev) + " (<0.05), " + fmt(secs, 2) + " s (<30)"};
}

Outcome marginal_equality() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticCorpus c = synth_generate(scenario(Scenario::Tabular, seed));
    const ExampleTable t = table_for(c, {0});
    const auto fam = affine_family({t.slot_dims[0]}, t.num_classes);
    TrainConfig cfg;
    cfg.seed = seed;
    const VEntropyEstimate h = estimate_v_entropy(t, fam, KnownSetSpec::of(fam, {}), cfg);
    const double h_y = empirical_conditional_entropy(joint_from_one_hot(t, t.dev), {});
    worst = std::max(worst, std::abs(h.bits - h_y));
  }
  return {worst < 0.02, "max |H_V(Y) - H(Y)| " + fmt(worst) + " over 10 seeds (<0.02)"};
}

Outcome non_negativity() {
  double lowest = 1e9;
  std::string where;
  for (Scenario sc : {Scenario::Independence, Scenario::SelfCondition, Scenario::PlantedAmbiguity})
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const double v = conditional_bits(sc, seed);
      if (v < lowest) {
        lowest = v;
        where = std::string(to_string(sc)) + " seed " + std::to_string(seed);
      }
    }
  return {lowest >= -0.02, "min conditional " + fmt(lowest) + " at " + where + " over 60 runs (>=-0.02)"};
}

Outcome near_zero(Scenario sc, double tol) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) worst = std::max(worst, std::abs(conditional_bits(sc, seed)));
  return {worst <= tol, "max |conditional| " + fmt(worst) + " over 10 seeds (<=" + fmt(tol, 2) + ")"};
}

// Nested zero-masked sub-families of the two-slot [B;phi] family:
// nothing active, the baseline slot only, everything.
Outcome monotonicity() {
  double worst = -1e9;
  std::string where;
  for (Scenario sc : {Scenario::Tabular, Scenario::Independence, Scenario::SelfCondition, Scenario::PlantedAmbiguity})
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const SyntheticCorpus c = synth_generate(scenario(sc, seed));
      const std::uint32_t second = sc == Scenario::Tabular ? 0u : (sc == Scenario::PlantedAmbiguity ? 2u : 1u);
      const ExampleTable t = table_for(c, {0, second});
      const auto full = affine_family({t.slot_dims[0], t.slot_dims[1]}, t.num_classes);
      std::vector<std::size_t> slot0(t.slot_dims[0]);
      for (std::size_t d = 0; d < slot0.size(); ++d) slot0[d] = d;
      const PredictiveFamilySpec chain[] = {zero_masked_family(full, std::vector<std::size_t>{}),
                                            zero_masked_family(full, slot0), full};
      TrainConfig cfg;
      cfg.seed = seed;
      std::vector<double> h;
      for (const auto& fam : chain) h.push_back(estimate_v_entropy(t, fam, KnownSetSpec::of(fam, {0, 1}), cfg).bits);
      for (std::size_t i = 1; i < h.size(); ++i) {
        const double excess = h[i] - h[i - 1];
        if (excess > worst) {
          worst = excess;
          where = std::string(to_string(sc)) + " seed " + std::to_string(seed);
        }
      }
    }
  return {worst <= 0.02, "max H_larger - H_smaller " + fmt(worst) + " at " + where + " over 12 datasets (<=0.02)"};
}

Outcome gradients() {
  double worst_aff = 0.0, worst_mlp = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (bool mlp : {false, true}) {
      const auto fam = mlp ? mlp_family({4, 3}, 6, 5) : affine_family({4, 3}, 5);
      const auto rp = testing::random_problem(fam, 50000 + seed, 16);
      const double e = max_gradient_relative_error(rp.params, rp.batch);
      (mlp ? worst_mlp : worst_aff) = std::max(mlp ? worst_mlp : worst_aff, e);
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel err affine %.2e, one-hidden-layer %.2e over 50 probes each (<1e-4)",
                worst_aff, worst_mlp);
  return {worst_aff < 1e-4 && worst_mlp < 1e-4, buf};
}

Outcome planted() {
  const SyntheticCorpus c = synth_generate(scenario(Scenario::PlantedAmbiguity, 0));
  const std::uint32_t layer[] = {2};
  const LayerRecord r = run_experiment(c.dataset, c.bundle, layer, TrainConfig{}, {}).layers[0];
  return {r.baselined_bits < 0.0 && r.conditional_bits > 0.1,
          "layer 2 baselined " + fmt(r.baselined_bits) + " (<0), conditional " + fmt(r.conditional_bits) + " (>0.1)"};
}

Outcome table_arithmetic(const fs::path& work) {
  const fs::path fx = VINFO_FIXTURE_DIR;
  const auto out = work / "curves.csv";
  const auto r = testing::run_command(std::string(VINFO_CLI_PATH) + " report-curves --from '" +
                                      (fx / "roberta_single_layer_ventropy.csv").string() + "' '" +
                                      (fx / "roberta_two_layer_ventropy.csv").string() + "' --out '" + out.string() +
                                      "'");
  if (r.exit_code != 0) return {false, "report-curves exited " + std::to_string(r.exit_code) + ": " + r.output};
  const std::string csv = testing::slurp(out);
  const bool cond = csv.find(",upos,1,conditional,0.194\n") != std::string::npos;
  const bool base = csv.find(",upos,1,baselined,0.191\n") != std::string::npos;
  return {cond && base, std::string("upos layer 1 conditional ") + (cond ? "0.194" : "missing") + ", baselined " +
                            (base ? "0.191" : "missing")};
}

Outcome determinism(const fs::path& work) {
  const std::string cli = VINFO_CLI_PATH;
  const auto data = work / "planted";
  auto r = testing::run_command(cli + " synth --scenario planted_ambiguity --vocab 16 --n-train 4096 --n-dev 1024 " +
                                "--n-test 1024 --seed 5 --out-dir '" + data.string() + "'");
  if (r.exit_code != 0) return {false, "synth failed: " + r.output};
  for (const char* run : {"run_a", "run_b"}) {
    r = testing::run_command(cli + " estimate --seed 5 --config '" + (data / "experiment.cfg").string() +
                             "' --out-dir '" + (work / run).string() + "'");
    if (r.exit_code != 0) return {false, std::string(run) + " failed: " + r.output};
  }
  bool same = true;
  for (const char* f : {"report.json", "report.csv"})
    same = same && testing::slurp(work / "run_a" / f) == testing::slurp(work / "run_b" / f);
  return {same, same ? "report.json and report.csv byte-identical across two runs" : "outputs differ"};
}

}  // namespace

int main() {
  const fs::path work = testing::temp_dir("acceptance");
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"tabular oracle equivalence", tabular_oracle},
      {"marginal equality", marginal_equality},
      {"non-negativity", non_negativity},
      {"independence", [] { return near_zero(Scenario::Independence, 0.03); }},
      {"self-conditioning", [] { return near_zero(Scenario::SelfCondition, 0.02); }},
      {"monotonicity", monotonicity},
      {"gradient correctness", gradients},
      {"planted sign pattern", planted},
      {"exact table arithmetic", [&] { return table_arithmetic(work); }},
      {"determinism", [&] { return determinism(work); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
