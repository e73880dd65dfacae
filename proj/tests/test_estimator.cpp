#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vinfo/estimator.hpp"
#include "vinfo/oracle.hpp"

namespace vinfo {
namespace {

VEntropyEstimate fake(double bits, std::initializer_list<std::size_t> known, std::size_t slots = 2) {
  VEntropyEstimate e;
  e.family = affine_family(std::vector<std::size_t>(slots, 3), 4);
  e.known = KnownSetSpec::of(e.family, known);
  e.bits = bits;
  return e;
}

TEST(VInformation, IsTheDifferenceOfEntropies) {
  const auto v = v_information(fake(2.0, {0}), fake(1.2, {0, 1}));
  EXPECT_NEAR(v.bits, 0.8, 1e-12);
  EXPECT_EQ(v.source, (std::vector<std::size_t>{1}));
  EXPECT_EQ(v.conditioning, (std::vector<std::size_t>{0}));
}

TEST(VInformation, TableValuesForLayerOne) {
  // Two-layer table entries for the baseline row and layer 1 on upos.
  EXPECT_NEAR(v_information(fake(0.335, {0}), fake(0.141, {0, 1})).bits, 0.194, 1e-12);
}

TEST(VInformation, IdenticalEstimatesGiveZero) {
  const auto e = fake(1.7, {0});
  EXPECT_EQ(v_information(e, e).bits, 0.0);
}

TEST(VInformation, RejectsIncomparableEstimates) {
  auto a = fake(2.0, {0});
  auto b = fake(1.0, {0, 1});
  b.config.seed = 9;
  EXPECT_THROW(v_information(a, b), CompositionError);
  b = fake(1.0, {0, 1});
  b.eval_split = EvalSplit::Test;
  EXPECT_THROW(v_information(a, b), CompositionError);
  b = fake(1.0, {0, 1});
  b.family.num_classes = 5;
  b.known = KnownSetSpec::of(b.family, {0, 1});
  EXPECT_THROW(v_information(a, b), CompositionError);
  // Conditioning set must grow, not shrink.
  EXPECT_THROW(v_information(fake(1.0, {0, 1}), fake(2.0, {0})), CompositionError);
}

TEST(BaselinedProbing, TableValuesForLayerOne) {
  // Single-layer table: layer 0 at 0.336 and layer 1 at 0.145 on upos.
  EXPECT_NEAR(baselined_probing(fake(0.145, {1}), fake(0.336, {0})), 0.191, 1e-12);
}

TEST(BaselinedProbing, NeedsOneKnownSlotEach) {
  EXPECT_THROW(baselined_probing(fake(1.0, {0, 1}), fake(2.0, {0})), CompositionError);
  EXPECT_THROW(baselined_probing(fake(1.0, {1}), fake(2.0, {})), CompositionError);
}

TEST(ConditionalProbing, ChecksArityAndKnownSets) {
  EXPECT_NEAR(conditional_probing(fake(0.141, {0, 1}), fake(0.335, {0})), 0.194, 1e-12);
  EXPECT_THROW(conditional_probing(fake(1.0, {0, 1, 2}, 3), fake(2.0, {0}, 3)), CompositionError);
  EXPECT_THROW(conditional_probing(fake(1.0, {0, 1}), fake(2.0, {1})), CompositionError);
  EXPECT_THROW(conditional_probing(fake(1.0, {1}), fake(2.0, {0})), CompositionError);
}

SyntheticCorpus planted(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.scenario = Scenario::PlantedAmbiguity;
  spec.vocab = 16;
  spec.n_train = 4096;
  spec.n_dev = 1024;
  spec.n_test = 1024;
  spec.seed = seed;
  return synth_generate(spec);
}

TEST(RunExperiment, PlantedAmbiguityShowsTheSignPattern) {
  const SyntheticCorpus c = planted(0);
  const std::uint32_t layers[] = {2};
  const ProbingReport r = run_experiment(c.dataset, c.bundle, layers, TrainConfig{}, {});
  ASSERT_EQ(r.layers.size(), 1u);
  EXPECT_LT(r.layers[0].baselined_bits, 0.0);
  EXPECT_GT(r.layers[0].conditional_bits, 0.1);
}

TEST(RunExperiment, ReportArithmeticIsExact) {
  const SyntheticCorpus c = planted(1);
  const std::uint32_t layers[] = {1, 2};
  const ProbingReport r = run_experiment(c.dataset, c.bundle, layers, TrainConfig{}, {});
  for (const LayerRecord& l : r.layers) {
    EXPECT_EQ(l.baselined_bits, l.H_given_B - l.H_given_layer);
    EXPECT_EQ(l.conditional_bits, l.H_given_B - l.H_given_B_and_layer);
    EXPECT_EQ(l.v_info_bits, l.H_marginal - l.H_given_layer);
    EXPECT_GE(l.task_metric, 0.0);
    EXPECT_LE(l.task_metric, 1.0);
  }
  EXPECT_EQ(r.eval_split, "dev");
  EXPECT_EQ(r.metric, "accuracy");
}

TEST(RunExperiment, IdenticalLayersGiveIdenticalRecordsAndThreadsDoNotMatter) {
  ScenarioSpec spec;
  spec.scenario = Scenario::SelfCondition;
  spec.n_train = 512;
  spec.n_dev = 256;
  SyntheticCorpus c = synth_generate(spec);
  // Append a copy of layer 1 as layer 2.
  RepresentationBundle b = c.bundle;
  b.n_layers = 3;
  for (std::size_t s = 0; s < b.sentences.size(); ++s) {
    auto& vals = b.sentences[s].values;
    const std::size_t per_layer = vals.size() / 2;
    vals.insert(vals.end(), vals.begin() + static_cast<std::ptrdiff_t>(per_layer), vals.end());
  }
  TrainConfig cfg;
  cfg.max_epochs = 8;
  const std::uint32_t layers[] = {1, 2};
  ExperimentOptions one, two;
  two.threads = 2;
  const ProbingReport a = run_experiment(c.dataset, b, layers, cfg, one);
  const ProbingReport d = run_experiment(c.dataset, b, layers, cfg, two);
  LayerRecord l1 = a.layers[0], l2 = a.layers[1];
  l2.layer = 1;
  EXPECT_EQ(l1, l2);
  EXPECT_EQ(a, d);
}

TEST(RunExperiment, MissingLayerIsADataError) {
  const SyntheticCorpus c = planted(0);
  const std::uint32_t layers[] = {3};
  EXPECT_THROW(run_experiment(c.dataset, c.bundle, layers, TrainConfig{}, {}), DataError);
}

TEST(RunExperiment, TrainingFailureNamesTheLayer) {
  SyntheticCorpus c = planted(0);
  c.bundle.sentences[c.dataset.split.train[0]].values[0] = std::numeric_limits<float>::quiet_NaN();
  const std::uint32_t layers[] = {1};
  try {
    run_experiment(c.dataset, c.bundle, layers, TrainConfig{}, {});
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("layer 1: ", 0), 0u) << e.what();
  }
}

TEST(RunExperiment, SpanF1MetricOnBioLabels) {
  // Two-word sentences whose tags follow the first word: w0 -> B-X, w1 -> I-X, else O.
  LabeledDataset ds;
  ds.vocab = {"O", "B-X", "I-X"};
  RepresentationBundle b;
  b.n_layers = 2;
  b.dim = 3;
  Rng rng(4);
  for (std::size_t s = 0; s < 300; ++s) {
    LabeledSentence sent;
    SentenceRepr r;
    r.n_words = 2;
    r.values.assign(2 * 2 * 3, 0.0f);
    const std::uint32_t first = rng.below(2) ? 1u : 0u;
    const std::uint32_t tags[2] = {first, first == 1 ? 2u : 0u};
    for (std::size_t w = 0; w < 2; ++w) {
      const std::size_t id = w == 0 ? (first == 1 ? 0 : 2) : (first == 1 ? 1 : 2);
      r.values[(0 * 2 + w) * 3 + id] = 1.0f;
      r.values[(1 * 2 + w) * 3 + id] = 1.0f;
      sent.tokens.push_back("w" + std::to_string(id));
      sent.labels.push_back(tags[w]);
    }
    (s < 200 ? ds.split.train : ds.split.dev).push_back(s);
    ds.sentences.push_back(sent);
    b.sentences.push_back(r);
  }
  ExperimentOptions opt;
  opt.metric = Metric::SpanF1;
  TrainConfig cfg;
  cfg.lr0 = 0.05;
  const std::uint32_t layers[] = {1};
  const ProbingReport rep = run_experiment(ds, b, layers, cfg, opt);
  EXPECT_EQ(rep.metric, "span_f1");
  EXPECT_EQ(rep.layers[0].task_metric, 1.0);
}

}  // namespace
}  // namespace vinfo
