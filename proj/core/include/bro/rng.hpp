#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace bro {

/// Counter-based random stream.
///
/// Output i of a stream with key k is splitmix64_mix(k + (i + 1) * golden), so
/// a stream is fully described by (key, counter) and can be copied freely.
/// Child streams are obtained with split(), which hashes a tag into the key;
/// children with distinct tags are statistically independent of each other
/// and of the parent. There is no global state anywhere in the library: every
/// sampling operation takes a Stream by reference.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t seed) noexcept : key_(mix(seed ^ kSeedSalt)) {}

  /// Derived stream for a numeric tag.
  [[nodiscard]] Stream split(std::uint64_t tag) const noexcept;
  /// Derived stream for a textual tag (stage names).
  [[nodiscard]] Stream split(std::string_view tag) const noexcept;
  /// Derived stream for a sequence of tags, applied left to right.
  [[nodiscard]] Stream split(std::initializer_list<std::uint64_t> tags) const noexcept;

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two words per call.
  double normal() noexcept;

  /// Exponential with unit mean; consumes one word per call.
  double exponential() noexcept;

  /// Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape) noexcept;

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  struct FromKey {};
  constexpr Stream(FromKey, std::uint64_t key) noexcept : key_(key) {}

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x5851f42d4c957f2dULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// FNV-1a over bytes; used for config hashing and textual stream tags.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace bro
