// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_RNG_HPP
#define MATOPT_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace matopt {

// Counter-based generator (SplitMix64). The state advances by a fixed
// odd increment and the output is a bijective mix of the counter, so
// any substream can be derived by hashing, independent of draw order.
//
// Stream splitting convention used across the library:
//   scenario user k      -> split(seed, 0x5cn, k)
//   sweep trial t        -> split(seed, 0x7r1, t)
//   randomization cand c -> split(seed, 0x6rd, c)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // standard normal via Box-Muller (explicit, platform-independent)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // circularly-symmetric complex Gaussian with E{|z|^2} = var
    std::complex<double> cscg(double var) {
        const double s = std::sqrt(var / 2.0);
        return {s * normal(), s * normal()};
    }

    // derive a decorrelated substream from (seed, domain tag, index)
    static Rng split(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
        Rng h(seed);
        std::uint64_t s = h.next_u64();
        s ^= mix(tag + 0x9e3779b97f4a7c15ULL);
        s ^= mix(index + 0xd1b54a32d192ed03ULL);
        return Rng(s);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace matopt

#endif
