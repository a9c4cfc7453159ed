#ifndef MAVG_RNG_HPP
#define MAVG_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace mavg {

/// Deterministic random source. Uses the standard-specified mt19937_64
/// engine but hand-rolled variate transforms, because the standard leaves
/// distribution algorithms implementation-defined and reproducible byte
/// output across toolchains is part of the artifact contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// One draw from the unit-step index range [0, n).
    std::size_t index(std::size_t n) {
        // modulo bias is < 2^-50 for the sizes used here
        return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller (no cached second value).
    double normal() {
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform direction on the unit sphere.
    Eigen::Vector3d unit_vector() {
        for (;;) {
            Eigen::Vector3d v(normal(), normal(), normal());
            const double n = v.norm();
            if (n > 1e-9) return v / n;
        }
    }

    /// Uniform point in the ball of given radius.
    Eigen::Vector3d in_ball(double radius) {
        for (;;) {
            Eigen::Vector3d v(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
            if (v.squaredNorm() <= 1.0) return radius * v;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

    /// splitmix64 finalizer; also used to derive independent substream seeds.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return mix(seed ^ mix(stream + 0x51ed270b9d7c3e4fULL));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace mavg

#endif // MAVG_RNG_HPP
