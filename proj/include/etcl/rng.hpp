#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace etcl {

// Deterministic substream seeding. Every noise source in a run (per-robot
// process noise, per-sensor measurement noise, per-edge channel draws) gets
// its own engine derived from the master seed and a structural key, so
// changing e.g. the trigger threshold or the channel probability never
// perturbs the realizations consumed by another source. That is what makes
// paired comparisons across delta/cp values meaningful.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(master ^ fnv1a64(tag));
  s = splitmix64(s ^ (a * 0x9e3779b97f4a7c15ull));
  s = splitmix64(s ^ (b * 0xc2b2ae3d27d4eb4full));
  return s;
}

class RngStream {
 public:
  RngStream() : engine_(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return unif_(engine_); }

  double gaussian(double stddev) { return stddev * normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace etcl
