#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sysmdp {

/// Identifier recorded in every output that depends on random variates.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64";

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of substream `index` of stream family `tag` under `master`.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) noexcept;

/// Stream family tags, so that unrelated consumers never share variates.
namespace stream {
inline constexpr std::uint64_t kTrajectory = 0x7472616a;  // "traj"
inline constexpr std::uint64_t kShuffle = 0x73687566;     // "shuf"
inline constexpr std::uint64_t kModel = 0x6d6f646c;       // "modl"
}  // namespace stream

/**
 * Seedable 64-bit generator with inverse-transform friendly uniforms.
 * Satisfies UniformRandomBitGenerator so it also feeds <random> distributions.
 */
class Rng {
public:
    using result_type = std::mt19937_64::result_type;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on (0, 1]: never zero, so -log(u) is finite.
    double uniform_open0() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace sysmdp
