#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "gapcomp/errors.hpp"

// Little-endian primitive I/O for the binary store formats. All multi-byte
// values are written byte-by-byte so files are identical across hosts.
namespace gapcomp::binio {

inline void write_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void write_f32(std::ostream& os, float v) {
  write_u32(os, std::bit_cast<std::uint32_t>(v));
}

inline void write_f64(std::ostream& os, double v) {
  write_u64(os, std::bit_cast<std::uint64_t>(v));
}

// Length-prefixed UTF-8 string (u32 byte count + bytes).
inline void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint8_t read_u8(std::istream& is, const char* field) {
  int c = is.get();
  if (c == std::char_traits<char>::eof())
    throw DataError(std::string("format error: truncated file reading ") + field);
  return static_cast<std::uint8_t>(c);
}

inline std::uint32_t read_u32(std::istream& is, const char* field) {
  char b[4];
  if (!is.read(b, 4))
    throw DataError(std::string("format error: truncated file reading ") + field);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream& is, const char* field) {
  char b[8];
  if (!is.read(b, 8))
    throw DataError(std::string("format error: truncated file reading ") + field);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

inline float read_f32(std::istream& is, const char* field) {
  return std::bit_cast<float>(read_u32(is, field));
}

inline double read_f64(std::istream& is, const char* field) {
  return std::bit_cast<double>(read_u64(is, field));
}

inline std::string read_string(std::istream& is, const char* field) {
  std::uint32_t len = read_u32(is, field);
  std::string s(len, '\0');
  if (len > 0 && !is.read(s.data(), len))
    throw DataError(std::string("format error: truncated file reading ") + field);
  return s;
}

}  // namespace gapcomp::binio
