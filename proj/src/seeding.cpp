#include "gaudit/seeding.hpp"

#include <cstdio>

namespace gaudit {

void Fnv1a::update(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= bytes[i];
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::update(std::string_view text) {
  update(text.data(), text.size());
  // terminator keeps ("ab","c") distinct from ("a","bc")
  const unsigned char sep = 0xff;
  update(&sep, 1);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<SeedTag> tags) {
  Fnv1a h;
  h.update_value(master);
  for (const auto& tag : tags) {
    if (const auto* s = std::get_if<std::string_view>(&tag)) {
      h.update(*s);
    } else {
      const std::int64_t v = std::get<std::int64_t>(tag);
      h.update_value(v);
    }
  }
  return splitmix64(h.digest());
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace gaudit
