// Deterministic random streams. Every randomized routine takes an explicit
// stream; derived streams are keyed by (seed, stream-id) so parallel tasks
// produce the same numbers regardless of scheduling.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace wernerlab {

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(mix(seed, stream)) {}

    // Derived stream for task `index`, independent of this stream's state.
    static Rng derive(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed, index + 1);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() {
        return (gen_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (pairwise cached). std::normal_distribution
    // is not pinned down by the standard, so we keep the transform explicit.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    std::complex<double> complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    // Unit vector distributed with the rotation-invariant (Haar) measure.
    Eigen::VectorXcd haar_vector(int dim) {
        Eigen::VectorXcd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
        double n = v.norm();
        while (n == 0.0) {  // astronomically unlikely; retry keeps the contract exact
            for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
            n = v.norm();
        }
        return v / n;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::mt19937_64 mix(std::uint64_t seed, std::uint64_t stream) {
        const std::uint64_t a = splitmix64(seed);
        const std::uint64_t b = splitmix64(a ^ splitmix64(stream));
        return std::mt19937_64(b);
    }

    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace wernerlab
