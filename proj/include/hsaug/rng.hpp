#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include "hsaug/image.hpp"

namespace hsaug {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Per-record seed. Depends only on its arguments, never on execution order,
/// so parallel generation and single-record replay agree.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view source_id, std::uint64_t realization,
                                 std::string_view stage) {
    std::string key;
    key.reserve(source_id.size() + stage.size() + 24);
    key.append(source_id).append(":").append(stage).append(":").append(std::to_string(realization));
    return splitmix64(splitmix64(master) ^ fnv1a64(key));
}

/// Seeded random stream with platform-independent draws. std::mt19937_64 is
/// bit-exact by the standard; the distributions on top of it are not, so the
/// bounded draws are done here by rejection.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw InvalidParameter("Rng::uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == std::numeric_limits<std::uint64_t>::max()) return static_cast<std::int64_t>(engine_());
        const std::uint64_t range = span + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return lo + static_cast<std::int64_t>(draw % range);
    }

    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace hsaug
