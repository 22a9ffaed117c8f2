#include "gdm/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "gdm/error.hpp"

namespace gdm {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t a = splitmix64(seed);
    std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                         static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    auto seq = make_seed_seq(seed, stream);
    engine_.seed(seq);
}

Rng Rng::substream(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream_)), stream);
}

double Rng::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) throw ArgumentError("uniform_index: empty range");
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
    // Marsaglia polar method; no cached second value so the state stays a plain engine.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

double Rng::log_gamma_draw(double shape) {
    if (!(shape > 0.0)) throw ArgumentError("gamma shape must be positive");
    // Marsaglia-Tsang; shapes below one are boosted with Gamma(a) = Gamma(a+1) * U^(1/a).
    double boost = 0.0;
    double a = shape;
    if (a < 1.0) {
        boost = std::log(uniform()) / shape;
        a += 1.0;
    }
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 ||
            std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return std::log(d * v) + boost;
        }
    }
}

double Rng::gamma(double shape) { return std::exp(log_gamma_draw(shape)); }

std::size_t sample_proportional(std::span<const double> weights, Rng& rng) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw ArgumentError("sample_proportional: weights sum to zero");
    double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;
}

}  // namespace gdm
