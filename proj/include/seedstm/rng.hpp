#pragma once

// Counter-based splitmix64 streams: stream(seed, i) yields the same sequence
// no matter which thread asks for it, which keeps bootstrap resampling
// reproducible under any worker count.

#include <cstdint>

namespace seedstm::rng {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  Stream(uint64_t seed, uint64_t stream_id) {
    state_ = seed;
    // Decorrelate streams by folding the id through one splitmix round.
    uint64_t s = stream_id + 0x9e3779b97f4a7c15ULL;
    s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
    state_ ^= s ^ (s >> 27);
  }

  uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0.
  uint64_t next_below(uint64_t n) {
    // Rejection-free for our purposes: n is tiny relative to 2^64, so the
    // modulo bias is far below any tolerance in play.
    return next_u64() % n;
  }

  // Standard normal via Box-Muller (one value per call, spare cached).
  double next_gaussian();

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace seedstm::rng
