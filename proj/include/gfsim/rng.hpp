#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gfsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based key derivation: the stream for (key, index) never depends on
/// the order in which other streams were consumed.
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t index) {
  return splitmix64(key ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key), engine_(splitmix64(key)) {}

  std::uint64_t key() const { return key_; }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u;
    do {
      u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  double normal() { return normal_(engine_); }

  std::uint64_t index(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

  Rng child(std::uint64_t index) const { return Rng(derive_key(key_, index)); }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gfsim
