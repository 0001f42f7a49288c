#ifndef QMETRO_RNG_HPP
#define QMETRO_RNG_HPP

#include <cstdint>
#include <random>

namespace qmetro {

// splitmix64 step; used to derive independent stream seeds from a root seed
// so parallel workers and restarts are reproducible regardless of order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-stream generator: stream index folded into the seed.
inline std::mt19937_64 seededEngine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  return std::mt19937_64(a ^ (b << 1));
}

}  // namespace qmetro

#endif  // QMETRO_RNG_HPP
