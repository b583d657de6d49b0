#pragma once

#include <cstdint>
#include <random>

namespace mms {

// Deterministic random stream. Distribution helpers are hand-rolled on top of
// the raw 64-bit output so that generated corpora are bit-identical across
// standard libraries (std::uniform_real_distribution is not portable).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t index(std::uint64_t n) {
    // modulo bias is irrelevant for corpus generation at our n
    return eng_() % n;
  }

  int sign() { return (eng_() & 1) ? 1 : -1; }

private:
  std::mt19937_64 eng_;
};

}  // namespace mms
