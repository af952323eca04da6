#ifndef SGF_RNG_HPP
#define SGF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace sgf {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic generator under the (seed, stream) contract: distinct streams
// derived from the same base seed are independent for Monte Carlo purposes and
// reproducible bit-for-bit.  All variate transforms are implemented here so
// results do not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (stream + 1));
    std::seed_seq seq{static_cast<unsigned>(splitmix64(s)),
                      static_cast<unsigned>(splitmix64(s) >> 32),
                      static_cast<unsigned>(splitmix64(s)),
                      static_cast<unsigned>(splitmix64(s) >> 32)};
    engine_.seed(seq);
  }

  // uniform on the open interval (0,1)
  double u01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double exponential(double rate) { return -std::log(u01()) / rate; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  bool bernoulli(double p) { return u01() < p; }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sgf

#endif
