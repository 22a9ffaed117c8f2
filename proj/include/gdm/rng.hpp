#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gdm {

/// Seedable random state. Independent substreams are derived from (seed, stream)
/// so per-document work gives the same draws regardless of scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// A new generator keyed on this generator's seed and the given stream id.
    Rng substream(std::uint64_t stream) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n);
    double normal();
    /// log of a Gamma(shape, 1) draw; stays finite for very small shapes.
    double log_gamma_draw(double shape);
    double gamma(double shape);

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Draw an index with probability proportional to `weights` (nonnegative, positive sum).
std::size_t sample_proportional(std::span<const double> weights, Rng& rng);

/// In-place Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = rng.uniform_index(i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace gdm
