#ifndef VINFO_DATASET_HPP
#define VINFO_DATASET_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vinfo/error.hpp"

namespace vinfo {

/// Per-sentence slab of float32 vectors laid out layer-major, then word-major.
struct SentenceRepr {
  std::uint32_t n_words = 0;
  std::vector<float> values;
};

/// Layer-indexed word vectors for a corpus. Layer 0 is the baseline.
struct RepresentationBundle {
  std::uint32_t n_layers = 0;
  std::uint32_t dim = 0;
  std::vector<SentenceRepr> sentences;

  std::span<const float> vector(std::size_t sentence, std::size_t layer, std::size_t word) const {
    const SentenceRepr& s = sentences[sentence];
    const std::size_t off = (layer * s.n_words + word) * dim;
    return std::span<const float>(s.values).subspan(off, dim);
  }
  std::span<float> vector(std::size_t sentence, std::size_t layer, std::size_t word) {
    SentenceRepr& s = sentences[sentence];
    const std::size_t off = (layer * s.n_words + word) * dim;
    return std::span<float>(s.values).subspan(off, dim);
  }

  void validate() const {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const std::size_t expect = static_cast<std::size_t>(n_layers) * sentences[i].n_words * dim;
      if (sentences[i].values.size() != expect)
        throw ShapeError("sentence " + std::to_string(i) + " holds " + std::to_string(sentences[i].values.size()) +
                         " values, expected " + std::to_string(expect));
    }
  }
};

inline bool bitwise_equal(const RepresentationBundle& a, const RepresentationBundle& b) {
  if (a.n_layers != b.n_layers || a.dim != b.dim || a.sentences.size() != b.sentences.size()) return false;
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    const auto& x = a.sentences[i];
    const auto& y = b.sentences[i];
    if (x.n_words != y.n_words || x.values.size() != y.values.size()) return false;
    if (std::memcmp(x.values.data(), y.values.data(), x.values.size() * sizeof(float)) != 0) return false;
  }
  return true;
}

enum class Granularity { Word, Sentence };
enum class SplitPart { Train, Dev, Test };
enum class EvalSplit { Dev, Test };

inline const char* to_string(EvalSplit s) { return s == EvalSplit::Dev ? "dev" : "test"; }
inline const char* to_string(Granularity g) { return g == Granularity::Word ? "word" : "sentence"; }
inline SplitPart part_of(EvalSplit s) { return s == EvalSplit::Dev ? SplitPart::Dev : SplitPart::Test; }

/// Sentence indices per partition.
struct Split {
  std::vector<std::size_t> train, dev, test;

  const std::vector<std::size_t>& part(SplitPart p) const {
    return p == SplitPart::Train ? train : (p == SplitPart::Dev ? dev : test);
  }
  bool empty() const { return train.empty() && dev.empty() && test.empty(); }
  bool operator==(const Split&) const = default;
};

/// One sentence: its tokens and label ids (one per token for word tasks,
/// exactly one for sentence tasks).
struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> labels;
  bool operator==(const LabeledSentence&) const = default;
};

struct LabeledDataset {
  Granularity granularity = Granularity::Word;
  std::vector<LabeledSentence> sentences;
  std::vector<std::string> vocab;
  Split split;

  std::size_t num_classes() const { return vocab.size(); }
  bool operator==(const LabeledDataset&) const = default;
};

/// Rejects overlapping or out-of-range partitions, empty train/dev, and
/// dev/test labels that never occur in train.
inline void validate_split(const LabeledDataset& ds) {
  const Split& sp = ds.split;
  if (sp.train.empty()) throw DataError("train split is empty");
  if (sp.dev.empty()) throw DataError("dev split is empty");
  std::vector<int> owner(ds.sentences.size(), -1);
  const std::vector<std::size_t>* parts[] = {&sp.train, &sp.dev, &sp.test};
  for (int p = 0; p < 3; ++p) {
    for (std::size_t idx : *parts[p]) {
      if (idx >= ds.sentences.size())
        throw DataError("split index " + std::to_string(idx) + " exceeds sentence count " +
                        std::to_string(ds.sentences.size()));
      if (owner[idx] != -1) throw DataError("sentence index " + std::to_string(idx) + " appears in two splits");
      owner[idx] = p;
    }
  }
  std::vector<bool> in_train(ds.vocab.size(), false);
  for (std::size_t idx : sp.train)
    for (std::uint32_t y : ds.sentences[idx].labels) in_train[y] = true;
  for (int p = 1; p < 3; ++p)
    for (std::size_t idx : *parts[p])
      for (std::uint32_t y : ds.sentences[idx].labels)
        if (!in_train[y])
          throw DataError("label '" + ds.vocab[y] + "' in " + (p == 1 ? "dev" : "test") + " sentence " +
                          std::to_string(idx) + " never occurs in train");
}

/// Sentence and token counts must line up before any training starts.
inline void check_consistency(const LabeledDataset& ds, const RepresentationBundle& bundle) {
  if (ds.sentences.size() != bundle.sentences.size())
    throw DataError("label file has " + std::to_string(ds.sentences.size()) + " sentences, representations have " +
                    std::to_string(bundle.sentences.size()));
  for (std::size_t i = 0; i < ds.sentences.size(); ++i)
    if (ds.sentences[i].tokens.size() != bundle.sentences[i].n_words)
      throw DataError("sentence " + std::to_string(i) + " has " + std::to_string(ds.sentences[i].tokens.size()) +
                      " tokens but " + std::to_string(bundle.sentences[i].n_words) + " vectors");
}

/// Probe-ready examples: one row per word (word tasks) or per sentence
/// (sentence tasks, vectors averaged over words), one column block per slot.
struct ExampleTable {
  std::vector<std::size_t> slot_dims;
  std::size_t num_classes = 0;
  std::size_t size = 0;
  std::vector<std::vector<double>> slots;  // slot -> size x dim, row-major
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> sentence_of;
  std::vector<std::size_t> train, dev, test;

  std::span<const double> slot_value(std::size_t slot, std::size_t example) const {
    return std::span<const double>(slots[slot]).subspan(example * slot_dims[slot], slot_dims[slot]);
  }
  const std::vector<std::size_t>& part(SplitPart p) const {
    return p == SplitPart::Train ? train : (p == SplitPart::Dev ? dev : test);
  }
};

/// Builds examples whose slot `s` reads layer `slot_layers[s]` of the bundle.
inline ExampleTable build_examples(const LabeledDataset& ds, const RepresentationBundle& bundle,
                                   std::span<const std::uint32_t> slot_layers) {
  check_consistency(ds, bundle);
  validate_split(ds);
  for (std::uint32_t l : slot_layers)
    if (l >= bundle.n_layers)
      throw DataError("layer " + std::to_string(l) + " requested but bundle has " + std::to_string(bundle.n_layers));

  ExampleTable t;
  t.slot_dims.assign(slot_layers.size(), bundle.dim);
  t.num_classes = ds.num_classes();
  t.slots.resize(slot_layers.size());
  const std::size_t dim = bundle.dim;

  std::vector<int> part_of_sentence(ds.sentences.size(), -1);
  for (std::size_t i : ds.split.train) part_of_sentence[i] = 0;
  for (std::size_t i : ds.split.dev) part_of_sentence[i] = 1;
  for (std::size_t i : ds.split.test) part_of_sentence[i] = 2;

  auto push_example = [&](std::size_t s, std::uint32_t label) {
    const std::size_t idx = t.size++;
    t.labels.push_back(label);
    t.sentence_of.push_back(s);
    switch (part_of_sentence[s]) {
      case 0: t.train.push_back(idx); break;
      case 1: t.dev.push_back(idx); break;
      case 2: t.test.push_back(idx); break;
      default: break;
    }
  };

  for (std::size_t s = 0; s < ds.sentences.size(); ++s) {
    const LabeledSentence& sent = ds.sentences[s];
    const std::size_t n_words = sent.tokens.size();
    if (ds.granularity == Granularity::Word) {
      if (sent.labels.size() != n_words) throw DataError("sentence " + std::to_string(s) + " label/token count mismatch");
      for (std::size_t w = 0; w < n_words; ++w) {
        for (std::size_t k = 0; k < slot_layers.size(); ++k) {
          auto v = bundle.vector(s, slot_layers[k], w);
          t.slots[k].insert(t.slots[k].end(), v.begin(), v.end());
        }
        push_example(s, sent.labels[w]);
      }
    } else {
      if (sent.labels.size() != 1) throw DataError("sentence task needs one label per sentence");
      if (n_words == 0) throw DataError("sentence " + std::to_string(s) + " has no words to average");
      for (std::size_t k = 0; k < slot_layers.size(); ++k) {
        std::vector<double> mean(dim, 0.0);
        for (std::size_t w = 0; w < n_words; ++w) {
          auto v = bundle.vector(s, slot_layers[k], w);
          for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
        }
        for (double& m : mean) m /= static_cast<double>(n_words);
        t.slots[k].insert(t.slots[k].end(), mean.begin(), mean.end());
      }
      push_example(s, sent.labels[0]);
    }
  }
  return t;
}

}  // namespace vinfo

#endif  // VINFO_DATASET_HPP
