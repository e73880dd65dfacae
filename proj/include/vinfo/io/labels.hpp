#ifndef VINFO_IO_LABELS_HPP
#define VINFO_IO_LABELS_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/io/text.hpp"

// Word tasks: one "token<TAB>label" line per token, a blank line between
// sentences. Sentence tasks: one "label<TAB>space separated text" line per
// sentence. Label ids follow first appearance in the file.
namespace vinfo::io {

inline LabeledDataset parse_labels(std::string_view text, Granularity granularity, const std::string& source = "") {
  const std::string where = source.empty() ? std::string{} : source + ": ";
  LabeledDataset ds;
  ds.granularity = granularity;
  std::unordered_map<std::string, std::uint32_t> ids;
  auto label_id = [&](const std::string& name) {
    auto [it, fresh] = ids.try_emplace(name, static_cast<std::uint32_t>(ds.vocab.size()));
    if (fresh) ds.vocab.push_back(name);
    return it->second;
  };

  const auto lines = lines_of(text);
  LabeledSentence current;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    if (granularity == Granularity::Word && line.empty()) {
      if (!current.tokens.empty()) ds.sentences.push_back(std::move(current));
      current = {};
      continue;
    }
    if (granularity == Granularity::Sentence && trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw ParseError(where + "expected 2 tab-separated fields, found " + std::to_string(fields.size()), line_no);
    if (granularity == Granularity::Word) {
      if (fields[0].empty() || fields[1].empty()) throw ParseError(where + "empty token or label", line_no);
      current.tokens.push_back(fields[0]);
      current.labels.push_back(label_id(fields[1]));
    } else {
      if (fields[0].empty()) throw ParseError(where + "empty label", line_no);
      LabeledSentence s;
      for (const auto& tok : split(fields[1], ' '))
        if (!tok.empty()) s.tokens.push_back(tok);
      if (s.tokens.empty()) throw ParseError(where + "sentence has no tokens", line_no);
      s.labels.push_back(label_id(fields[0]));
      ds.sentences.push_back(std::move(s));
    }
  }
  if (!current.tokens.empty()) ds.sentences.push_back(std::move(current));
  if (ds.sentences.empty()) throw DataError(where + "label file contains no sentences");
  return ds;
}

inline LabeledDataset read_labels(const std::filesystem::path& path, Granularity granularity) {
  return parse_labels(read_file(path), granularity, path.string());
}

inline std::string format_labels(const LabeledDataset& ds) {
  std::string out;
  for (const LabeledSentence& s : ds.sentences) {
    if (ds.granularity == Granularity::Word) {
      for (std::size_t i = 0; i < s.tokens.size(); ++i) out += s.tokens[i] + '\t' + ds.vocab[s.labels[i]] + '\n';
      out += '\n';
    } else {
      out += ds.vocab[s.labels.at(0)] + '\t';
      for (std::size_t i = 0; i < s.tokens.size(); ++i) out += (i ? " " : "") + s.tokens[i];
      out += '\n';
    }
  }
  return out;
}

inline void write_labels(const std::filesystem::path& path, const LabeledDataset& ds) {
  write_file(path, format_labels(ds));
}

}  // namespace vinfo::io

#endif  // VINFO_IO_LABELS_HPP
