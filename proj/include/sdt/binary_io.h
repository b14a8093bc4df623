// Copyright 2026 The sdtag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SDT_BINARY_IO_H_
#define SDT_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "sdt/error.h"

namespace sdt::binary {

// Little-endian fixed-width encoding for the checkpoint and embedding files.

template <typename T>
T ByteSwap(T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
    std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

template <typename T>
void Write(std::ostream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) value = ByteSwap(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T Read(std::istream& in, const char* what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ValidationError(std::string("truncated file while reading ") + what);
  if constexpr (std::endian::native == std::endian::big) value = ByteSwap(value);
  return value;
}

inline void WriteString(std::ostream& out, const std::string& s) {
  Write<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string ReadString(std::istream& in, const char* what,
                              std::uint32_t max_len = 1u << 28) {
  const auto len = Read<std::uint32_t>(in, what);
  if (len > max_len) throw ValidationError(std::string("implausible length for ") + what);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw ValidationError(std::string("truncated file while reading ") + what);
  return s;
}

inline void ExpectMagic(std::istream& in, const char magic[4], const std::string& file) {
  char got[4];
  in.read(got, 4);
  if (!in || std::memcmp(got, magic, 4) != 0) {
    throw ValidationError(file + ": bad magic, expected " + std::string(magic, 4));
  }
}

}  // namespace sdt::binary

#endif  // SDT_BINARY_IO_H_
