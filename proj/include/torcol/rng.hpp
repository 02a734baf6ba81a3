#pragma once

#include <cstdint>
#include <random>

namespace torcol {

// Generator contract: std::mt19937_64 (fully specified by the C++ standard)
// seeded with one 64-bit word. Bounded integers use Lemire's multiply-shift
// with rejection, so draws are reproducible across standard libraries.
// Replica r of a run with root seed s uses seed splitmix64(s + r).
inline constexpr const char* kGeneratorName = "mt19937_64+lemire;replica_seed=splitmix64(root+r)";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t replica_seed(std::uint64_t root, std::uint64_t replica) { return splitmix64(root + replica); }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace torcol
