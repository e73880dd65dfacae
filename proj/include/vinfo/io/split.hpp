#ifndef VINFO_IO_SPLIT_HPP
#define VINFO_IO_SPLIT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/io/text.hpp"
#include "vinfo/random.hpp"

namespace vinfo::io {

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  bool operator==(const SplitRatios&) const = default;
};

/// Shuffles sentence indices with `seed` and cuts them by ratio. Each part
/// is returned in ascending index order.
inline LabeledDataset attach_split(LabeledDataset ds, const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9)
    throw ArgumentError("split ratios must be non-negative and sum to 1");
  const std::size_t n = ds.sentences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  const auto n_dev = std::min(n - n_train, static_cast<std::size_t>(std::llround(ratios.dev * static_cast<double>(n))));
  ds.split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  ds.split.dev.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev));
  ds.split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev), order.end());
  std::sort(ds.split.train.begin(), ds.split.train.end());
  std::sort(ds.split.dev.begin(), ds.split.dev.end());
  std::sort(ds.split.test.begin(), ds.split.test.end());
  return ds;
}

/// Uses caller-supplied sentence index lists; any index listed twice is an error.
inline LabeledDataset attach_split(LabeledDataset ds, std::vector<std::size_t> train, std::vector<std::size_t> dev,
                                   std::vector<std::size_t> test) {
  std::vector<int> seen(ds.sentences.size(), 0);
  for (const auto* part : {&train, &dev, &test}) {
    for (std::size_t idx : *part) {
      if (idx >= ds.sentences.size())
        throw DataError("split index " + std::to_string(idx) + " exceeds sentence count " +
                        std::to_string(ds.sentences.size()));
      if (seen[idx]++) throw DataError("split index " + std::to_string(idx) + " appears in more than one split");
    }
  }
  ds.split = Split{std::move(train), std::move(dev), std::move(test)};
  return ds;
}

/// Whitespace separated sentence indices.
inline std::vector<std::size_t> read_index_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::size_t> out;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (const auto& tok : split(trim(lines[i]), ' ')) {
      if (tok.empty()) continue;
      std::size_t v = 0;
      if (!parse_int(tok, v)) throw ParseError(path.string() + ": bad sentence index '" + tok + "'", i + 1);
      out.push_back(v);
    }
  }
  return out;
}

inline void write_index_file(const std::filesystem::path& path, std::span<const std::size_t> indices) {
  std::string out;
  for (std::size_t v : indices) out += std::to_string(v) + '\n';
  write_file(path, out);
}

}  // namespace vinfo::io

#endif  // VINFO_IO_SPLIT_HPP
