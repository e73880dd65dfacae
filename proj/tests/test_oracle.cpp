#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vinfo/oracle.hpp"

namespace vinfo {
namespace {

DiscreteJoint joint_xy(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  DiscreteJoint j(1);
  for (auto [x, y] : pairs) {
    const std::uint32_t xs[] = {x};
    j.add(xs, y);
  }
  return j;
}

TEST(ConditionalEntropy, DeterministicLabelsHaveZeroEntropy) {
  const auto j = joint_xy({{0, 1}, {0, 1}, {1, 2}, {1, 2}});
  EXPECT_EQ(empirical_conditional_entropy(j, {0}), 0.0);
}

TEST(ConditionalEntropy, BalancedCoinIsOneBit) {
  const auto j = joint_xy({{0, 0}, {0, 1}, {0, 0}, {0, 1}});
  EXPECT_NEAR(empirical_conditional_entropy(j, {}), 1.0, 1e-15);
  EXPECT_NEAR(empirical_conditional_entropy(j, {0}), 1.0, 1e-15);
}

TEST(ConditionalEntropy, WorkedExample) {
  // (a,0) x2, (a,1) x2, (b,0) x4
  DiscreteJoint j(1);
  const std::uint32_t a[] = {0}, b[] = {1};
  j.add(a, 0, 2);
  j.add(a, 1, 2);
  j.add(b, 0, 4);
  EXPECT_EQ(j.total(), 8u);
  EXPECT_NEAR(empirical_conditional_entropy(j, {0}), 0.5, 1e-15);
  const double h_y = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  EXPECT_NEAR(empirical_conditional_entropy(j, {}), h_y, 1e-15);
  EXPECT_NEAR(shannon_mi(j, 0), h_y - 0.5, 1e-15);
  EXPECT_NEAR(shannon_mi(j, 0), 0.311278, 1e-6);
}

TEST(ShannonMi, IndependentIsZeroAndCopyIsOneBit) {
  const auto indep = joint_xy({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  EXPECT_NEAR(shannon_mi(indep, 0), 0.0, 1e-15);
  const auto copy = joint_xy({{0, 0}, {1, 1}, {0, 0}, {1, 1}});
  EXPECT_NEAR(shannon_mi(copy, 0), 1.0, 1e-15);
}

TEST(ShannonMi, SourceInConditioningSetIsRejected) {
  const auto j = joint_xy({{0, 0}});
  EXPECT_THROW(shannon_mi(j, 0, {0}), ArgumentError);
}

TEST(ShannonMi, IsSymmetricProperty) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    DiscreteJoint xy(1);
    for (int i = 0; i < 200; ++i) {
      const auto x = static_cast<std::uint32_t>(rng.below(4));
      const auto y = static_cast<std::uint32_t>(rng.bernoulli(0.7) ? x % 3 : rng.below(3));
      const std::uint32_t xs[] = {x};
      xy.add(xs, y);
    }
    const DiscreteJoint yx = xy.swap_target(0);
    EXPECT_NEAR(shannon_mi(xy, 0), shannon_mi(yx, 0), 1e-12) << "seed " << seed;
    EXPECT_GE(shannon_mi(xy, 0), 0.0);
  }
}

TEST(DiscreteJoint, RejectsWideValuesAndWrongArity) {
  DiscreteJoint j(2);
  const std::uint32_t ok[] = {1, 2}, wide[] = {1, 64}, shortv[] = {1};
  EXPECT_NO_THROW(j.add(ok, 0));
  EXPECT_THROW(j.add(wide, 0), ArgumentError);
  EXPECT_THROW(j.add(shortv, 0), ShapeError);
  EXPECT_THROW(j.add(ok, 64), ArgumentError);
}

TEST(Synth, TabularMatchesDesignedEntropy) {
  ScenarioSpec spec;
  spec.n_train = 40000;
  spec.n_dev = 8;
  const SyntheticCorpus c = synth_generate(spec);
  for (const auto& row : c.designed_table) {
    double s = 0.0;
    for (double p : row) s += p;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  const std::vector<std::vector<std::uint32_t>> cols = {c.word_ids};
  const auto j = DiscreteJoint::from_columns(cols, c.labels);
  // Words are drawn uniformly, so the empirical H(Y|X) converges to the row average.
  EXPECT_NEAR(empirical_conditional_entropy(j, {0}), c.designed_conditional_entropy(), 0.02);
}

TEST(Synth, IndependenceNoiseCarriesNoInformation) {
  ScenarioSpec spec;
  spec.scenario = Scenario::Independence;
  spec.n_train = 40000;
  const SyntheticCorpus c = synth_generate(spec);
  const std::vector<std::vector<std::uint32_t>> cols = {c.word_ids, c.context_ids};
  const auto j = DiscreteJoint::from_columns(cols, c.labels);
  EXPECT_LT(shannon_mi(j, 1, {0}), 0.01);
  EXPECT_LT(shannon_mi(j, 1), 0.01);
}

TEST(Synth, PlantedContextIsRedundantAloneButUsefulGivenTheWord) {
  ScenarioSpec spec;
  spec.scenario = Scenario::PlantedAmbiguity;
  spec.vocab = 16;
  spec.n_train = 20000;
  const SyntheticCorpus c = synth_generate(spec);
  const std::vector<std::vector<std::uint32_t>> cols = {c.word_ids, c.context_ids};
  const auto j = DiscreteJoint::from_columns(cols, c.labels);
  EXPECT_LT(shannon_mi(j, 1), shannon_mi(j, 0));
  EXPECT_GT(shannon_mi(j, 1, {0}), 0.1);
}

TEST(Synth, LayoutMatchesScenario) {
  ScenarioSpec spec;
  spec.n_train = 20;
  spec.n_dev = 9;
  spec.n_test = 3;
  spec.sentence_length = 8;
  const SyntheticCorpus c = synth_generate(spec);
  EXPECT_EQ(c.bundle.n_layers, 1u);
  EXPECT_EQ(c.bundle.dim, 8u);
  EXPECT_EQ(c.dataset.split.train.size(), 3u);  // 8 + 8 + 4 words
  EXPECT_EQ(c.dataset.split.dev.size(), 2u);
  EXPECT_EQ(c.dataset.split.test.size(), 1u);
  EXPECT_EQ(c.labels.size(), 32u);
  spec.scenario = Scenario::PlantedAmbiguity;
  const SyntheticCorpus p = synth_generate(spec);
  EXPECT_EQ(p.bundle.n_layers, 3u);
  EXPECT_EQ(p.bundle.dim, 12u);
  EXPECT_NO_THROW(check_consistency(p.dataset, p.bundle));
}

TEST(Synth, SameSeedIsReproducible) {
  ScenarioSpec spec;
  spec.scenario = Scenario::PlantedAmbiguity;
  spec.n_train = 100;
  spec.n_dev = 100;
  const SyntheticCorpus a = synth_generate(spec);
  const SyntheticCorpus b = synth_generate(spec);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_TRUE(bitwise_equal(a.bundle, b.bundle));
  spec.seed = 1;
  EXPECT_NE(synth_generate(spec).labels, a.labels);
}

TEST(Synth, RejectsMoreClassesThanWordsForTabular) {
  ScenarioSpec spec;
  spec.vocab = 3;
  spec.classes = 4;
  EXPECT_THROW(synth_generate(spec), ArgumentError);
  EXPECT_THROW(parse_scenario("planted"), ArgumentError);
  EXPECT_EQ(parse_scenario("self_condition"), Scenario::SelfCondition);
}

}  // namespace
}  // namespace vinfo
