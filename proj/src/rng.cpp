#include "pathspace/rng.hpp"

#include <cmath>
#include <numbers>

namespace pathspace::rng {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) noexcept {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

Counter philox4x64(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void uniforms(StreamKey key, std::uint64_t step, std::uint64_t channel,
              std::span<double> out) noexcept {
  const Key k{key.seed, key.path};
  std::size_t i = 0;
  for (std::uint64_t block = 0; i < out.size(); ++block) {
    const Counter r = philox4x64({step, channel, block, 0}, k);
    for (int j = 0; j < 4 && i < out.size(); ++j) out[i++] = to_open_unit(r[j]);
  }
}

void standard_normals(StreamKey key, std::uint64_t step, std::uint64_t channel,
                      std::span<double> out) noexcept {
  const Key k{key.seed, key.path};
  std::size_t i = 0;
  for (std::uint64_t block = 0; i < out.size(); ++block) {
    const Counter r = philox4x64({step, channel, block, 0}, k);
    for (int pair = 0; pair < 2 && i < out.size(); ++pair) {
      const double u1 = to_open_unit(r[2 * pair]);
      const double u2 = to_open_unit(r[2 * pair + 1]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      out[i++] = radius * std::cos(angle);
      if (i < out.size()) out[i++] = radius * std::sin(angle);
    }
  }
}

double Sampler::normal() {
  if (left_ == 0) {
    standard_normals(key_, step_++, channel::sampling(0), buf_);
    left_ = 4;
  }
  return buf_[4 - left_--];
}

double Sampler::uniform() {
  std::array<double, 1> u{};
  uniforms(key_, step_++, channel::sampling(1), u);
  return u[0];
}

}  // namespace pathspace::rng
