#pragma once

#include <cmath>
#include <cstdint>

namespace mav {

/// Small counter-friendly PRNG (splitmix64). Used everywhere instead of
/// <random> so that streams are bit-identical across platforms and
/// independent of evaluation order: per-event generators are derived from
/// (seed, event index) rather than from one shared sequential stream.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t s = 0) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Poisson sample (Knuth); intended for small lambda.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double l = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }
};

/// Derives an independent substream for event `index` of stream `stream_id`
/// under a scenario seed.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream_id,
                            std::uint64_t index) {
  SplitMix64 mix(seed ^ (stream_id * 0xd1342543de82ef95ULL));
  mix.state ^= index * 0x9e3779b97f4a7c15ULL;
  mix.next();
  return mix;
}

}  // namespace mav
