#ifndef VINFO_IO_REPR_CODEC_HPP
#define VINFO_IO_REPR_CODEC_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/error.hpp"
#include "vinfo/io/text.hpp"

// .vrep layout, all integers little-endian:
//
//   offset 0   magic "VREP"
//          4   u32 version (= 1)
//          8   u32 n_layers
//         12   u32 dim
//         16   u32 n_sentences
//   then per sentence:
//              u32 n_words
//              n_layers * n_words * dim float32 values, layer-major then word-major
namespace vinfo::io {

inline constexpr char kReprMagic[4] = {'V', 'R', 'E', 'P'};
inline constexpr std::uint32_t kReprVersion = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n)
      throw LengthError(std::string("truncated .vrep: need ") + std::to_string(n) + " bytes for " + what + ", have " +
                            std::to_string(bytes_.size() - pos_),
                        pos_);
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::span<const std::uint8_t> take(std::size_t n) {
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_repr(const RepresentationBundle& bundle) {
  bundle.validate();
  std::vector<std::uint8_t> out(kReprMagic, kReprMagic + 4);
  detail::put_u32(out, kReprVersion);
  detail::put_u32(out, bundle.n_layers);
  detail::put_u32(out, bundle.dim);
  detail::put_u32(out, static_cast<std::uint32_t>(bundle.sentences.size()));
  for (const SentenceRepr& s : bundle.sentences) {
    detail::put_u32(out, s.n_words);
    for (float f : s.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

inline RepresentationBundle decode_repr(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.need(4, "magic");
  auto magic = r.take(4);
  for (int i = 0; i < 4; ++i)
    if (magic[i] != static_cast<std::uint8_t>(kReprMagic[i])) throw FormatError("bad .vrep magic", 0);
  const std::size_t version_at = r.pos();
  const std::uint32_t version = r.u32("version");
  if (version != kReprVersion) throw FormatError("unsupported .vrep version " + std::to_string(version), version_at);

  RepresentationBundle b;
  b.n_layers = r.u32("n_layers");
  b.dim = r.u32("dim");
  const std::uint32_t n_sentences = r.u32("n_sentences");
  b.sentences.reserve(std::min<std::size_t>(n_sentences, r.remaining() / 4));
  for (std::uint32_t i = 0; i < n_sentences; ++i) {
    SentenceRepr s;
    s.n_words = r.u32("n_words");
    const std::uint64_t count = std::uint64_t{b.n_layers} * s.n_words * b.dim;
    if (count > r.remaining() / 4) r.need(static_cast<std::size_t>(std::min<std::uint64_t>(count * 4, SIZE_MAX)), "sentence values");
    s.values.resize(static_cast<std::size_t>(count));
    auto raw = r.take(static_cast<std::size_t>(count) * 4);
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      std::uint32_t v = 0;
      for (int j = 0; j < 4; ++j) v |= static_cast<std::uint32_t>(raw[4 * k + j]) << (8 * j);
      s.values[k] = std::bit_cast<float>(v);
    }
    b.sentences.push_back(std::move(s));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last sentence", r.pos());
  return b;
}

inline void write_repr(const std::filesystem::path& path, const RepresentationBundle& bundle) {
  const auto bytes = encode_repr(bundle);
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline RepresentationBundle read_repr(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  return decode_repr(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

}  // namespace vinfo::io

#endif  // VINFO_IO_REPR_CODEC_HPP
