#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace decsim {

// Counter-based random streams. Every draw is keyed by (seed, stream, node,
// round), so any consumer can regenerate the exact same values in any order.
// Generator: splitmix64 state derivation + Box-Muller. Recorded in run
// metadata as "splitmix64-boxmuller-v1".

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  return mix64(state);
}

// Stream tags keep independent purposes from colliding on the same seed.
enum class StreamTag : std::uint64_t {
  Centers = 0,    // data-heterogeneity draws (b_i)
  GradNoise = 1,  // per-round stochastic-gradient noise
  SweepPoint = 2, // per-sweep-point seed derivation
  Generic = 3,    // test helpers
};

inline std::uint64_t derive_state(std::uint64_t seed, StreamTag tag,
                                  std::uint64_t node, std::uint64_t round) {
  std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
  s = mix64(s ^ (static_cast<std::uint64_t>(tag) + 0xbf58476d1ce4e5b9ULL));
  s = mix64(s ^ (node + 0x94d049bb133111ebULL));
  s = mix64(s ^ (round + 0xd6e8feb86659fd93ULL));
  return s;
}

// Uniform in (0, 1]; never 0 so log() below is safe.
inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Fills `out` with i.i.d. standard normals for the given key.
inline void fill_standard_normal(Eigen::Ref<Eigen::VectorXd> out,
                                 std::uint64_t seed, StreamTag tag,
                                 std::uint64_t node, std::uint64_t round) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::uint64_t state = derive_state(seed, tag, node, round);
  const Eigen::Index d = out.size();
  for (Eigen::Index k = 0; k < d; k += 2) {
    const double u1 = bits_to_unit(splitmix64_next(state));
    const double u2 = bits_to_unit(splitmix64_next(state));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    out[k] = radius * std::cos(kTwoPi * u2);
    if (k + 1 < d) out[k + 1] = radius * std::sin(kTwoPi * u2);
  }
}

inline const char* rng_name() { return "splitmix64-boxmuller-v1"; }

}  // namespace decsim
