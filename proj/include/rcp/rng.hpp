#pragma once

#include <cstdint>
#include <random>

namespace rcp {

// Tags separating the independent random streams of one replication.
enum class StreamTag : std::uint64_t {
  vertex = 1,
  edge = 2,
  edge_thinning = 3,
  replication = 4,
  cell = 5,
  auxiliary = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the stream (parent, tag, index). Distinct triples give unrelated seeds,
// so streams do not depend on scheduling or on how many streams exist.
constexpr std::uint64_t derive_seed(std::uint64_t parent, StreamTag tag,
                                    std::uint64_t index) noexcept {
  const std::uint64_t h =
      splitmix64(parent ^ splitmix64(static_cast<std::uint64_t>(tag) * 0xD1B54A32D192ED03ULL));
  return splitmix64(h + splitmix64(index ^ 0x8CB92BA72F3D8DD7ULL));
}

// A reproducible stream of uniforms on the open interval (0,1).
// Built on std::mt19937_64, whose output sequence is fixed by the standard;
// the conversion to double is done here so results do not depend on the
// standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t bits() noexcept { return engine_(); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcp
