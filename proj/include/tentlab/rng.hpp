#pragma once

#include <cstdint>
#include <random>

#include "common.hpp"

namespace tentlab {

// All randomness in the library flows from one 64-bit master seed.  Independent
// streams are derived as splitmix64(master ^ splitmix64(stream_id)), where the
// stream id is built from a per-purpose tag and a counter (e.g. the index of a
// sphere sample or a radial shell).  Re-running with the same seed therefore
// reproduces every draw bit for bit, independent of worker count.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t counter = 0) {
    return splitmix64(seed ^ splitmix64(tag ^ splitmix64(counter)));
}

// Purpose tags for stream derivation.
namespace stream_tag {
constexpr std::uint64_t sphere_sample = 0x5350484552453031ULL;
constexpr std::uint64_t shell_sample = 0x5348454c4c303031ULL;
constexpr std::uint64_t cone_inner = 0x434f4e4530303031ULL;
constexpr std::uint64_t lattice = 0x4c41545449434531ULL;
constexpr std::uint64_t generic = 0x47454e4552494331ULL;
}  // namespace stream_tag

class Rng {
public:
    explicit Rng(std::uint64_t stream) : eng_(stream) {}
    Rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t counter)
        : eng_(derive_stream(seed, tag, counter)) {}

    double uniform() { return unit_(eng_); }
    double uniform(double a, double b) { return a + (b - a) * unit_(eng_); }
    double normal() { return normal_(eng_); }
    std::uint64_t bits() { return eng_(); }

    // Standard complex Gaussian (variance 1 per real component).
    cdouble cnormal() { return {normal_(eng_), normal_(eng_)}; }

    // Uniform point on the unit sphere of C^n (= S^{2n-1}).
    CVec unit_sphere(int n) {
        CVec v(n);
        double ns;
        do {
            for (auto& c : v) c = cnormal();
            ns = norm_sq(v);
        } while (ns < 1e-30);
        const double inv = 1.0 / std::sqrt(ns);
        for (auto& c : v) c *= inv;
        return v;
    }

    // Uniform point (w.r.t. Lebesgue) in the closed unit ball of C^n.
    CVec unit_ball(int n) {
        CVec v = unit_sphere(n);
        const double r = std::pow(uniform(), 1.0 / (2.0 * n));
        for (auto& c : v) c *= r;
        return v;
    }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tentlab
