#pragma once

// Little-endian helpers shared by the embedding and checkpoint formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace sentinel::detail {

template <typename T>
void write_le(std::ostream& out, T value)
{
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(const unsigned char* bytes)
{
  unsigned char tmp[sizeof(T)];
  std::memcpy(tmp, bytes, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(tmp[i], tmp[sizeof(T) - 1 - i]);
    }
  }
  T value;
  std::memcpy(&value, tmp, sizeof(T));
  return value;
}

std::string read_file_bytes(const std::string& path);

} // namespace sentinel::detail
