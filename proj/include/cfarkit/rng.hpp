/* Copyright 2026 the cfarkit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CFARKIT_RNG_HPP
#define CFARKIT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace cfarkit {

// Counter-based generator in the SplitMix64 / SplittableRandom family.
// Every output word is a pure function of (seed, stream, substream, counter),
// so substreams can be assigned to pixels or experiment cells and drawn from
// in any order or any degree of parallelism with identical results.

inline constexpr std::uint64_t kRngGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

class RngStream {
  public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0)
        : key_(mix64(mix64(seed + kRngGamma * (stream + 1)) + substream)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * kRngGamma); }

    /// Uniform draw in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline double sample_exponential(RngStream& g, double mean = 1.0) {
    return -mean * std::log(g.uniform());
}

inline double sample_normal(RngStream& g) {
    // Box-Muller, no caching so the draw count per call is fixed.
    const double u1 = g.uniform();
    const double u2 = g.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

/// Marsaglia-Tsang squeeze method; exact for all shape > 0.
inline double sample_gamma(RngStream& g, double shape, double rate = 1.0) {
    if (shape < 1.0) {
        const double u = g.uniform();
        return sample_gamma(g, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(g);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = g.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

inline double sample_weibull(RngStream& g, double shape, double scale) {
    return scale * std::pow(-std::log(g.uniform()), 1.0 / shape);
}

inline double sample_lognormal(RngStream& g, double mu, double sigma) {
    return std::exp(mu + sigma * sample_normal(g));
}

inline double sample_rayleigh(RngStream& g, double scale) {
    return scale * std::sqrt(-2.0 * std::log(g.uniform()));
}

}  // namespace cfarkit

#endif  // CFARKIT_RNG_HPP
