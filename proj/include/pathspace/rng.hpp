#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (master seed, path index, step index, channel), so any path can be
// regenerated in isolation and worker scheduling never changes a value.

#include <array>
#include <cstdint>
#include <span>

namespace pathspace::rng {

using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al., SC'11).
Counter philox4x64(Counter ctr, Key key) noexcept;

/// Channel identifiers partition the counter space of one path.
namespace channel {
inline constexpr std::uint64_t driver = 0;
inline constexpr std::uint64_t bridge_base = std::uint64_t{1} << 32;
inline constexpr std::uint64_t resample_base = std::uint64_t{2} << 32;
inline constexpr std::uint64_t sampling_base = std::uint64_t{3} << 32;
inline constexpr std::uint64_t bridge(std::uint64_t level) { return bridge_base + level; }
inline constexpr std::uint64_t resample(std::uint64_t index) { return resample_base + index; }
inline constexpr std::uint64_t sampling(std::uint64_t index) { return sampling_base + index; }
}  // namespace channel

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
};

/// Uniform double in the open interval (0, 1) from the top 52 bits (53 would
/// let the largest value round up to 1).
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Fills `out` with independent standard normals for (step, channel).
/// Box-Muller on consecutive Philox blocks; block index is the third
/// counter word.
void standard_normals(StreamKey key, std::uint64_t step, std::uint64_t channel,
                      std::span<double> out) noexcept;

/// Fills `out` with uniforms on (0,1) for (step, channel).
void uniforms(StreamKey key, std::uint64_t step, std::uint64_t channel,
              std::span<double> out) noexcept;

/// Sequential convenience generator over a fixed (key, channel), advancing
/// the step word. Used for test-point sampling, never for drivers.
class Sampler {
 public:
  Sampler(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}
  double normal();
  double uniform();

 private:
  StreamKey key_;
  std::uint64_t step_ = 0;
  std::array<double, 4> buf_{};
  int left_ = 0;
};

}  // namespace pathspace::rng
