#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "panomatch/errors.hpp"

namespace panomatch::io {

/// Little-endian byte sink. All multi-byte values are composed explicitly so
/// output bytes do not depend on host endianness.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const char* p, std::size_t n) { buffer_.append(p, n); }
  void magic(const char tag[5]) { buffer_.append(tag, 4); }

  /// Length-prefixed UTF-8 string (u16 length + bytes).
  void string16(const std::string& s) {
    if (s.size() > 0xFFFF) throw ValidationError("identifier longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }

  const std::string& buffer() const { return buffer_; }

 private:
  std::string buffer_;
};

/// Little-endian byte source over an in-memory buffer. Read failures raise
/// FormatError carrying the offending byte offset.
class ByteReader {
 public:
  explicit ByteReader(const std::string& data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  bool exhausted() const { return pos_ >= data_.size(); }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8()) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

  std::string string16() {
    const std::uint16_t len = u16();
    need(len);
    std::string s = data_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  void expect_magic(const char tag[5]) {
    if (data_.size() < pos_ + 4 || std::memcmp(data_.data() + pos_, tag, 4) != 0)
      throw FormatError(std::string("bad magic, expected '") + tag + "'", pos_);
    pos_ += 4;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size())
      throw FormatError("truncated payload, need " + std::to_string(n) + " more byte(s)", pos_);
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

/// Formats a double with the given number of significant digits ("%.Ng").
/// Used by every CSV writer so output bytes are stable across runs.
inline std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to '" + path + "'");
}

}  // namespace panomatch::io
