#ifndef VINFO_ORACLE_HPP
#define VINFO_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/random.hpp"

namespace vinfo {

/// Count table over (x_1, ..., x_k, y) tuples of small discrete variables.
/// Variables are addressed by index 0..k-1; the target Y is stored last.
class DiscreteJoint {
 public:
  static constexpr std::uint32_t kMaxCardinality = 64;

  explicit DiscreteJoint(std::size_t num_vars) : num_vars_(num_vars) {}

  static DiscreteJoint from_columns(std::span<const std::vector<std::uint32_t>> columns,
                                    std::span<const std::uint32_t> target) {
    DiscreteJoint j(columns.size());
    std::vector<std::uint32_t> xs(columns.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != target.size()) throw ShapeError("joint columns differ in length");
        xs[c] = columns[c][i];
      }
      j.add(xs, target[i]);
    }
    return j;
  }

  void add(std::span<const std::uint32_t> xs, std::uint32_t y, std::uint64_t count = 1) {
    if (xs.size() != num_vars_) throw ShapeError("tuple arity does not match joint");
    std::vector<std::uint32_t> key(xs.begin(), xs.end());
    key.push_back(y);
    for (std::uint32_t v : key)
      if (v >= kMaxCardinality) throw ArgumentError("value " + std::to_string(v) + " exceeds joint cardinality limit");
    counts_[key] += count;
    total_ += count;
  }

  /// Same counts with variable `var` and the target exchanging roles.
  DiscreteJoint swap_target(std::size_t var) const {
    if (var >= num_vars_) throw ArgumentError("variable index out of range");
    DiscreteJoint out(num_vars_);
    for (const auto& [key, n] : counts_) {
      std::vector<std::uint32_t> k = key;
      std::swap(k[var], k.back());
      out.counts_[k] += n;
    }
    out.total_ = total_;
    return out;
  }

  std::size_t num_vars() const { return num_vars_; }
  std::uint64_t total() const { return total_; }
  const std::map<std::vector<std::uint32_t>, std::uint64_t>& counts() const { return counts_; }

 private:
  std::size_t num_vars_;
  std::uint64_t total_ = 0;
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts_;
};

/// Plug-in H(Y | conditioning) in bits, with 0 log 0 = 0.
inline double empirical_conditional_entropy(const DiscreteJoint& joint, std::span<const std::size_t> conditioning) {
  if (joint.total() == 0) throw ArgumentError("entropy of an empty table");
  for (std::size_t v : conditioning)
    if (v >= joint.num_vars()) throw ArgumentError("conditioning variable " + std::to_string(v) + " out of range");

  std::map<std::vector<std::uint32_t>, std::uint64_t> ctx, ctx_y;
  for (const auto& [key, n] : joint.counts()) {
    std::vector<std::uint32_t> c;
    for (std::size_t v : conditioning) c.push_back(key[v]);
    ctx[c] += n;
    c.push_back(key.back());
    ctx_y[c] += n;
  }
  const double total = static_cast<double>(joint.total());
  double h = 0.0;
  for (const auto& [key, n] : ctx_y) {
    std::vector<std::uint32_t> c(key.begin(), key.end() - 1);
    const double p_joint = static_cast<double>(n) / total;
    const double p_cond = static_cast<double>(n) / static_cast<double>(ctx.at(c));
    h -= p_joint * std::log2(p_cond);
  }
  return std::max(0.0, h);
}

inline double empirical_conditional_entropy(const DiscreteJoint& joint, std::initializer_list<std::size_t> cond) {
  return empirical_conditional_entropy(joint, std::span<const std::size_t>(cond.begin(), cond.size()));
}

/// I(source ; Y | conditioning) in bits.
inline double shannon_mi(const DiscreteJoint& joint, std::size_t source, std::span<const std::size_t> conditioning) {
  if (std::find(conditioning.begin(), conditioning.end(), source) != conditioning.end())
    throw ArgumentError("source variable is already in the conditioning set");
  std::vector<std::size_t> with(conditioning.begin(), conditioning.end());
  with.push_back(source);
  const double mi = empirical_conditional_entropy(joint, conditioning) - empirical_conditional_entropy(joint, with);
  return std::max(0.0, mi);
}

inline double shannon_mi(const DiscreteJoint& joint, std::size_t source, std::initializer_list<std::size_t> cond = {}) {
  return shannon_mi(joint, source, std::span<const std::size_t>(cond.begin(), cond.size()));
}

/// Shannon entropy in bits of a probability vector.
inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

enum class Scenario { Tabular, Independence, SelfCondition, PlantedAmbiguity };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Tabular: return "tabular";
    case Scenario::Independence: return "independence";
    case Scenario::SelfCondition: return "self_condition";
    case Scenario::PlantedAmbiguity: return "planted_ambiguity";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "tabular") return Scenario::Tabular;
  if (s == "independence") return Scenario::Independence;
  if (s == "self_condition") return Scenario::SelfCondition;
  if (s == "planted_ambiguity") return Scenario::PlantedAmbiguity;
  throw ArgumentError("unknown scenario '" + s + "'");
}

struct ScenarioSpec {
  Scenario scenario = Scenario::Tabular;
  std::size_t vocab = 8;
  std::size_t classes = 4;
  std::size_t n_train = 4096;
  std::size_t n_dev = 4096;
  std::size_t n_test = 0;
  std::size_t sentence_length = 8;
  double ambiguity_rate = 0.2;
  // Extra unnormalized weight on each word's dominant tag in the designed table.
  double dominant_boost = 2.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (vocab < 1 || classes < 2 || sentence_length < 1) throw ArgumentError("scenario sizes must be positive");
    if (vocab > DiscreteJoint::kMaxCardinality || classes > DiscreteJoint::kMaxCardinality)
      throw ArgumentError("scenario cardinalities exceed 64");
    if (n_train < 1 || n_dev < 1) throw ArgumentError("scenario needs train and dev examples");
    if (!(ambiguity_rate >= 0.0 && ambiguity_rate <= 1.0)) throw ArgumentError("ambiguity_rate must lie in [0, 1]");
    if (!(dominant_boost >= 0.0)) throw ArgumentError("dominant_boost must be non-negative");
    if (scenario == Scenario::Tabular && classes > vocab)
      throw ArgumentError("tabular scenario needs classes <= vocab, got " + std::to_string(classes) + " > " +
                          std::to_string(vocab));
  }
};

/// Generated corpus plus the ground truth it was drawn from.
struct SyntheticCorpus {
  LabeledDataset dataset;
  RepresentationBundle bundle;
  // P(y | word) the labels were drawn from (marginalized over any context).
  std::vector<std::vector<double>> designed_table;
  // Discrete variables per example in corpus order: word id and, when the
  // scenario has one, the noise or disambiguation id.
  std::vector<std::uint32_t> word_ids;
  std::vector<std::uint32_t> context_ids;
  std::vector<std::uint32_t> labels;

  double designed_conditional_entropy() const {
    double h = 0.0;
    for (const auto& row : designed_table) h += entropy_bits(row);
    return h / static_cast<double>(designed_table.size());
  }
};

/// Draws a synthetic corpus. All randomness comes from one Rng(spec.seed)
/// consumed in a fixed order: the designed table row by row, then per
/// example the word, the context id, the ambiguity coin, and the label.
///
/// Layers per scenario (every layer shares one dim):
///   Tabular          1 layer : onehot(word)
///   Independence     2 layers: onehot(word), onehot(z) with z independent
///   SelfCondition    2 layers: onehot(word), onehot(word)
///   PlantedAmbiguity 3 layers: [onehot(word); 0], [onehot(word); onehot(c)], [0; onehot(c)]
/// In PlantedAmbiguity each word has dominant tag word mod classes; with
/// probability ambiguity_rate the tag is the context feature c instead.
inline SyntheticCorpus synth_generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t V = spec.vocab;
  const std::size_t C = spec.classes;
  const bool planted = spec.scenario == Scenario::PlantedAmbiguity;

  SyntheticCorpus out;
  out.designed_table.assign(V, std::vector<double>(C, 0.0));
  for (std::size_t w = 0; w < V; ++w) {
    auto& row = out.designed_table[w];
    if (planted) {
      for (std::size_t y = 0; y < C; ++y) row[y] = spec.ambiguity_rate / static_cast<double>(C);
      row[w % C] += 1.0 - spec.ambiguity_rate;
      continue;
    }
    double total = 0.0;
    for (std::size_t y = 0; y < C; ++y) total += row[y] = 0.5 + rng.uniform();
    row[w % C] += spec.dominant_boost;
    total += spec.dominant_boost;
    for (double& p : row) p /= total;
  }

  std::uint32_t n_layers = 1;
  std::uint32_t dim = static_cast<std::uint32_t>(V);
  switch (spec.scenario) {
    case Scenario::Tabular: break;
    case Scenario::Independence:
    case Scenario::SelfCondition: n_layers = 2; break;
    case Scenario::PlantedAmbiguity:
      n_layers = 3;
      dim = static_cast<std::uint32_t>(V + C);
      break;
  }
  out.bundle.n_layers = n_layers;
  out.bundle.dim = dim;
  out.dataset.granularity = Granularity::Word;
  for (std::size_t y = 0; y < C; ++y) out.dataset.vocab.push_back("T" + std::to_string(y));

  const std::size_t part_sizes[3] = {spec.n_train, spec.n_dev, spec.n_test};
  std::vector<std::size_t>* part_lists[3] = {&out.dataset.split.train, &out.dataset.split.dev,
                                             &out.dataset.split.test};
  for (int p = 0; p < 3; ++p) {
    std::size_t remaining = part_sizes[p];
    while (remaining > 0) {
      const std::size_t len = std::min(remaining, spec.sentence_length);
      remaining -= len;
      part_lists[p]->push_back(out.dataset.sentences.size());
      LabeledSentence sent;
      SentenceRepr repr;
      repr.n_words = static_cast<std::uint32_t>(len);
      repr.values.assign(static_cast<std::size_t>(n_layers) * len * dim, 0.0f);
      auto at = [&](std::size_t layer, std::size_t word, std::size_t d) -> float& {
        return repr.values[(layer * len + word) * dim + d];
      };
      for (std::size_t i = 0; i < len; ++i) {
        const auto w = static_cast<std::uint32_t>(rng.below(V));
        std::uint32_t ctx = 0;
        std::uint32_t y = 0;
        if (planted) {
          ctx = static_cast<std::uint32_t>(rng.below(C));
          const bool ambiguous = rng.bernoulli(spec.ambiguity_rate);
          y = ambiguous ? ctx : static_cast<std::uint32_t>(w % C);
        } else {
          if (spec.scenario == Scenario::Independence) ctx = static_cast<std::uint32_t>(rng.below(V));
          y = static_cast<std::uint32_t>(rng.categorical(out.designed_table[w]));
        }
        at(0, i, w) = 1.0f;
        switch (spec.scenario) {
          case Scenario::Tabular: break;
          case Scenario::Independence: at(1, i, ctx) = 1.0f; break;
          case Scenario::SelfCondition: at(1, i, w) = 1.0f; break;
          case Scenario::PlantedAmbiguity:
            at(1, i, w) = 1.0f;
            at(1, i, V + ctx) = 1.0f;
            at(2, i, V + ctx) = 1.0f;
            break;
        }
        sent.tokens.push_back("w" + std::to_string(w));
        sent.labels.push_back(y);
        out.word_ids.push_back(w);
        out.context_ids.push_back(ctx);
        out.labels.push_back(y);
      }
      out.dataset.sentences.push_back(std::move(sent));
      out.bundle.sentences.push_back(std::move(repr));
    }
  }
  return out;
}

/// Joint over one-hot slot ids read back from an example table: variable k is
/// the argmax of slot k (ties to the lowest dim), restricted to `rows`.
inline DiscreteJoint joint_from_one_hot(const ExampleTable& table, std::span<const std::size_t> rows) {
  DiscreteJoint j(table.slot_dims.size());
  std::vector<std::uint32_t> xs(table.slot_dims.size());
  for (std::size_t i : rows) {
    for (std::size_t s = 0; s < xs.size(); ++s) {
      auto v = table.slot_value(s, i);
      xs[s] = static_cast<std::uint32_t>(std::max_element(v.begin(), v.end()) - v.begin());
    }
    j.add(xs, table.labels[i]);
  }
  return j;
}

}  // namespace vinfo

#endif  // VINFO_ORACLE_HPP
