#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <random>
#include <utility>
#include <vector>

namespace rvrp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of the i-th derived stream of a run. Streams depend only on
// (base, index), never on scheduling order, so multi-job runs reproduce.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return base ^ splitmix64(index);
}

// mt19937_64 plus hand-rolled samplers. The <random> distributions are not
// bit-portable across standard libraries; these are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // (0, 1]
    double uniform_open0() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive bounds, rejection sampled so the result is unbiased
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % range);
    }

    double normal(double mean, double sd) {
        const double u1 = uniform_open0();
        const double u2 = uniform();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    // normal conditioned on x >= lower (resampling)
    double truncated_normal(double mean, double sd, double lower) {
        double x;
        do {
            x = normal(mean, sd);
        } while (x < lower);
        return x;
    }

    // zero-mean Laplace with per-axis scale b (inverse CDF)
    double laplace(double scale) {
        double u;
        do {
            u = uniform() - 0.5;
        } while (u == -0.5);
        const double sign = u < 0.0 ? -1.0 : 1.0;
        return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
    }

    // uniform over the closed disk of the given radius
    std::pair<double, double> disk(double radius) {
        const double r = radius * std::sqrt(uniform());
        const double theta = 2.0 * kPi * uniform();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

    // k distinct values from {0, ..., n-1}; order is part of the draw
    std::vector<int> sample_without_replacement(int n, int k) {
        if (k > n || k < 0) throw std::invalid_argument("cannot sample " + std::to_string(k) +
                                                        " distinct values from " + std::to_string(n));
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(uniform_int(i, n - 1));
            std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        }
        idx.resize(static_cast<std::size_t>(k));
        return idx;
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 engine_;
};

}  // namespace rvrp
