#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace gaudit {

/// 64-bit FNV-1a over raw bytes; stable across platforms and runs.
class Fnv1a {
 public:
  void update(const void* data, std::size_t size);
  void update(std::string_view text);
  template <typename T>
  void update_value(const T& value) {
    update(&value, sizeof(T));
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t splitmix64(std::uint64_t x);

using SeedTag = std::variant<std::string_view, std::int64_t>;

// Task seeds are a pure function of the master seed and the task's identity,
// so results never depend on which worker ran which task.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<SeedTag> tags);

std::string hex64(std::uint64_t value);

}  // namespace gaudit
