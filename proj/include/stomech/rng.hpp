#pragma once

#include <cmath>
#include <cstdint>

namespace stomech {

// splitmix64: used to spread seeds into full-entropy initial states.
inline uint64_t splitmix64(uint64_t& x) {
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with per-substream seeding via splitmix64. Substream k of a
// master seed is independent of ensemble size and iteration order, which is
// what makes parallel path generation bit-reproducible.
class Xoshiro256pp {
 public:
  Xoshiro256pp() : Xoshiro256pp(0, 0) {}

  Xoshiro256pp(uint64_t master_seed, uint64_t substream) {
    uint64_t sm = master_seed ^ (substream * 0x9e3779b97f4a7c15ULL)
                              ^ 0xd1b54a32d192ed03ULL;
    for (auto& si : s_) si = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in (0,1); never returns 0 so it is safe inside logs
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; draws come in deterministic pairs
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace stomech
