#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace glnn {

using Rng = std::mt19937_64;

/// Derives independent, reproducible generators from one root seed.
///
/// Each consumer asks for a named substream ("split", "teacher/init",
/// "student/dropout", ...). Two streams with different names never share
/// state, so changing how much randomness one stage consumes cannot shift
/// any other stage.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t root) : root_(root) {}

  std::uint64_t root() const noexcept { return root_; }

  std::uint64_t seed_for(std::string_view name) const;
  Rng rng(std::string_view name) const { return Rng(seed_for(name)); }
  SeedStream child(std::string_view name) const { return SeedStream(seed_for(name)); }

 private:
  std::uint64_t root_;
};

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view text) noexcept;

}  // namespace glnn
