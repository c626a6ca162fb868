#pragma once
// Deterministic random source. Standard-library engines are specified but
// the distributions are not, so sampling is hand-rolled here: the same seed
// yields the same stream on every platform and standard library.
//
// A run owns one root generator; independent consumers (mobility, loss,
// swarm jitter) derive named substreams so adding a draw in one consumer
// never shifts another consumer's sequence.

#include <array>
#include <cstdint>
#include <string_view>

namespace waan::sim {

// splitmix64; used for seeding and substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    // xoshiro256**
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], inclusive. Fixed-point multiply keeps the
    // mapping exact and platform-independent.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        const auto wide = static_cast<unsigned __int128>(next_u64()) * range;
        return lo + static_cast<std::int64_t>(wide >> 64);
    }

    double uniform_real(double lo, double hi) { return lo + next_unit() * (hi - lo); }

    // Independent generator derived from this one's seed and a label. The
    // derivation depends only on (seed, name), never on draw order.
    Rng substream(std::string_view name) const {
        std::uint64_t h = 14695981039346656037ull;
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return Rng(seed_ ^ h);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
};

}  // namespace waan::sim
