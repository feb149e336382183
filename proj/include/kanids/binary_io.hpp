#pragma once

// Little-endian flat binary records shared by every model file.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanids/error.hpp"

namespace kanids::io {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void magic(std::string_view tag) { out_.write(tag.data(), static_cast<std::streamsize>(tag.size())); }

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

  void u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(b, 4);
  }

  void u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(b, 8);
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void f64s(std::span<const double> values) {
    for (double v : values) f64(v);
  }

  void check() const {
    if (!out_) throw Error(ErrorKind::Io, "write failed");
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  void expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in_ || got != tag)
      throw Error(ErrorKind::Format, "bad magic, expected '" + std::string(tag) + "'");
  }

  std::uint8_t u8() {
    char c;
    read(&c, 1);
    return static_cast<std::uint8_t>(c);
  }

  std::uint32_t u32() {
    unsigned char b[4];
    read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint64_t u64() {
    unsigned char b[8];
    read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::vector<double> f64s(std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
  }

 private:
  void read(char* dst, std::streamsize n) {
    in_.read(dst, n);
    if (in_.gcount() != n) throw Error(ErrorKind::Format, "truncated model file");
  }

  std::istream& in_;
};

}  // namespace kanids::io
