#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace autochemo {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each particle
// and step addresses its own counter, so streams do not depend on the order
// or thread that consumes them.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
      std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
      std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
      std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
      std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += W0;
      key[1] += W1;
    }
    return ctr;
  }
};

// Convenience view: a keyed stream at a fixed (a, b, c) address, drawing
// successive blocks by bumping the last counter word.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index, std::uint32_t step, std::uint32_t stream = 0)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        ctr_{std::uint32_t(index), std::uint32_t(index >> 32), step, stream << 16} {}

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    std::uint64_t v = (std::uint64_t(buf_[2 * pos_]) << 32) | buf_[2 * pos_ + 1];
    ++pos_;
    return v;
  }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

 private:
  void refill() {
    buf_ = Philox4x32::block(ctr_, key_);
    ++ctr_[3];
    pos_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter buf_{};
  int pos_ = 2;
};

inline double standard_normal(CounterRng& rng) {
  // Box-Muller; one value per call keeps the draw count fixed.
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace autochemo
