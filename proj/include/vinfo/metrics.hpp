#ifndef VINFO_METRICS_HPP
#define VINFO_METRICS_HPP

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vinfo/error.hpp"

namespace vinfo {

template <typename T>
double accuracy(std::span<const T> pred, std::span<const T> gold) {
  if (pred.size() != gold.size())
    throw ArgumentError("accuracy over sequences of length " + std::to_string(pred.size()) + " and " +
                        std::to_string(gold.size()));
  if (gold.empty()) throw ArgumentError("accuracy of an empty sequence");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += pred[i] == gold[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

template <typename T>
double accuracy(const std::vector<T>& pred, const std::vector<T>& gold) {
  return accuracy(std::span<const T>(pred), std::span<const T>(gold));
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::string type;
  auto operator<=>(const Span&) const = default;
};

using SpanSet = std::set<Span>;

/// Decodes BIO tags into maximal typed spans. An I-T that does not continue
/// a span of type T opens a new one.
inline SpanSet bio_decode(std::span<const std::string> tags) {
  SpanSet spans;
  bool open = false;
  Span cur;
  auto close = [&] {
    if (open) spans.insert(cur);
    open = false;
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& t = tags[i];
    if (t == "O") {
      close();
      continue;
    }
    if (t.size() < 3 || t[1] != '-' || (t[0] != 'B' && t[0] != 'I'))
      throw ParseError("malformed BIO tag '" + t + "'", i, "position");
    std::string type = t.substr(2);
    if (t[0] == 'I' && open && cur.type == type) {
      cur.end = i;
      continue;
    }
    close();
    cur = Span{i, i, std::move(type)};
    open = true;
  }
  close();
  return spans;
}

inline SpanSet bio_decode(const std::vector<std::string>& tags) { return bio_decode(std::span<const std::string>(tags)); }

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Micro-averaged exact-match span scores over aligned sentence lists.
/// No predictions gives precision 1; no gold spans gives recall 1.
inline PrfScore span_f1(std::span<const SpanSet> pred, std::span<const SpanSet> gold) {
  if (pred.size() != gold.size()) throw ArgumentError("span_f1 needs one predicted span set per gold sentence");
  std::size_t tp = 0, n_pred = 0, n_gold = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    n_pred += pred[i].size();
    n_gold += gold[i].size();
    for (const Span& s : pred[i]) tp += gold[i].count(s);
  }
  PrfScore r;
  r.precision = n_pred == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(n_pred);
  r.recall = n_gold == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(n_gold);
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

inline PrfScore span_f1(const SpanSet& pred, const SpanSet& gold) {
  return span_f1(std::span<const SpanSet>(&pred, 1), std::span<const SpanSet>(&gold, 1));
}

}  // namespace vinfo

#endif  // VINFO_METRICS_HPP
