#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace cmusim {

// Counter-based random streams. Every draw is addressed by an explicit index,
// so two simulations sharing a stream read identical values regardless of how
// many draws each one consumes in between. This is what makes common-random-
// number coupling and skip-ahead service constructions cheap: there is no
// generator state to advance or cache.

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent substream id from a root seed, a purpose tag and up
// to two integer coordinates (queue/server/replication indices).
inline uint64_t substream(uint64_t seed, std::string_view tag, uint64_t a = 0,
                          uint64_t b = 0) {
  uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
  for (unsigned char c : tag) h = mix64(h ^ c) + 0x9e3779b97f4a7c15ull;
  h = mix64(h ^ a);
  h = mix64(h + 0x3c6ef372fe94f82bull * (b + 1));
  return h;
}

class Stream {
 public:
  Stream() : id_(0) {}
  Stream(uint64_t seed, std::string_view tag, uint64_t a = 0, uint64_t b = 0)
      : id_(substream(seed, tag, a, b)) {}

  uint64_t bits_at(uint64_t n) const {
    return mix64(id_ + (n + 1) * 0x9e3779b97f4a7c15ull);
  }

  // n-th uniform in [0, 1), random access, n >= 0
  double uniform_at(uint64_t n) const {
    return static_cast<double>(bits_at(n) >> 11) * 0x1.0p-53;
  }

  bool bernoulli_at(uint64_t n, double p) const { return uniform_at(n) < p; }

  // uniform pick from {0, ..., m-1}
  int pick_at(uint64_t n, int m) const {
    int v = static_cast<int>(uniform_at(n) * m);
    return v >= m ? m - 1 : v;
  }

  // geometric on {1, 2, ...} with success probability p, by inversion
  long long geometric_at(uint64_t n, double p) const {
    double u = uniform_at(n);
    long long g = 1 + static_cast<long long>(std::log1p(-u) / std::log1p(-p));
    return g < 1 ? 1 : g;
  }

  uint64_t id() const { return id_; }

 private:
  uint64_t id_;
};

}  // namespace cmusim
