#pragma once

#include <cstdint>
#include <random>

namespace msl {

// Root seed plus a substream label. Identical (seed, stream_id) pairs produce
// identical draw sequences regardless of run or thread count.
struct RandomSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    RandomSeed substream(std::uint64_t id) const { return RandomSeed{seed, id}; }
};

// Deterministic substream generator. The engine state is derived by hashing
// (seed, stream_id) with splitmix64, so substreams are statistically
// independent and never share state across threads.
class RngStream {
public:
    explicit RngStream(RandomSeed s);
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : RngStream(RandomSeed{seed, stream_id}) {}

    std::uint64_t next_u64() { return engine_(); }

    // 53-bit uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe for inverse-CDF transforms with poles at 0.
    double uniform01_open_low() { return 1.0 - uniform01(); }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via the polar method (deterministic, caches the spare).
    double normal();

    // Gamma(shape, 1) via Marsaglia-Tsang squeeze, boosted for shape < 1.
    double gamma(double shape);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {
std::uint64_t splitmix64(std::uint64_t& state);
}

}  // namespace msl
