#pragma once

// Counter-based pseudorandom numbers: every draw is a pure function of
// (seed, stream, index), so results do not depend on evaluation order or thread count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace gaussmin {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(detail::splitmix64(seed)) {}

  constexpr std::uint64_t stream_key(std::uint64_t stream) const noexcept {
    return detail::splitmix64(key_ ^ detail::splitmix64(stream));
  }

  static constexpr std::uint64_t keyed_bits(std::uint64_t skey, std::uint64_t index) noexcept {
    return detail::splitmix64(skey + 0x632be59bd9b4e019ULL * (index + 1));
  }

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const noexcept {
    return keyed_bits(stream_key(stream), index);
  }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    return to_unit(bits(stream, index));
  }

  static double to_unit(std::uint64_t b) noexcept {
    return (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normals z[index], z[index ^ 1] from one Box-Muller pair.
  void normal_pair(std::uint64_t stream, std::uint64_t pair, double& z0, double& z1) const noexcept {
    keyed_normal_pair(stream_key(stream), pair, z0, z1);
  }

  static void keyed_normal_pair(std::uint64_t skey, std::uint64_t pair, double& z0,
                                double& z1) noexcept {
    const double u1 = to_unit(keyed_bits(skey, 2 * pair));
    const double u2 = to_unit(keyed_bits(skey, 2 * pair + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(th);
    z1 = r * std::sin(th);
  }

  double normal(std::uint64_t stream, std::uint64_t index) const noexcept {
    double z0 = 0.0;
    double z1 = 0.0;
    normal_pair(stream, index / 2, z0, z1);
    return (index % 2 == 0) ? z0 : z1;
  }

  /// Fills out[0..count) with the normals of `stream`.
  template <class Out>
  void normals(std::uint64_t stream, Out* out, std::size_t count) const noexcept {
    const std::uint64_t skey = stream_key(stream);
    std::size_t i = 0;
    for (; i + 1 < count; i += 2) {
      double z0 = 0.0;
      double z1 = 0.0;
      keyed_normal_pair(skey, i / 2, z0, z1);
      out[i] = z0;
      out[i + 1] = z1;
    }
    if (i < count) out[i] = normal(stream, i);
  }

 private:
  std::uint64_t key_;
};

}  // namespace gaussmin
