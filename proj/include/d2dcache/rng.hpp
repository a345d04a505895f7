#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace d2dcache {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds an ordered list of identifiers (master seed, realization index,
/// link endpoints, purpose tag, ...) into one stream key.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto p : parts) {
        h = mix64(h ^ mix64(p));
    }
    return h;
}

/// Purpose tags keep streams drawn for different quantities independent.
enum class StreamTag : std::uint64_t {
    Placement = 1,
    Requests,
    Caches,
    LinkState,
    LinkShadowing,
    BsState,
    BsShadowing,
    BsMonteCarlo,
};

/**
 * Counter-based random bit generator.
 *
 * Output i of the stream with key k is mix64(k + i * golden_gamma), so a
 * stream is fully determined by its key and can be re-created anywhere
 * without carrying state across threads. Satisfies the standard
 * UniformRandomBitGenerator requirements and plugs into <random>
 * distributions.
 */
class StreamEngine {
public:
    using result_type = std::uint64_t;

    explicit constexpr StreamEngine(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline StreamEngine make_stream(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                                std::uint64_t b = 0, std::uint64_t c = 0)
{
    return StreamEngine(derive_key({master, static_cast<std::uint64_t>(tag), a, b, c}));
}

} // namespace d2dcache
