#ifndef BSBO_RNG_HPP
#define BSBO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bsbo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Derives an independent stream seed from (master, purpose, indices).
/// Every consumer of randomness draws from its own derived stream, so adding
/// or reordering consumers never perturbs the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = detail::splitmix64(master ^ detail::fnv1a64(purpose));
    h = detail::splitmix64(h ^ a);
    h = detail::splitmix64(h ^ b);
    return h;
}

/// Seeded generator with draw primitives pinned to this codebase (the
/// standard leaves distribution algorithms implementation-defined, which
/// would break byte-identical reruns across toolchains).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, m), rejection-sampled to avoid modulo bias.
    std::uint64_t bounded(std::uint64_t m) {
        if (m <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % m);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % m;
    }

    bool coin() { return (engine_() & 1ULL) != 0; }

    /// Standard normal via Box-Muller; draws two uniforms, no cached spare.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace bsbo

#endif // BSBO_RNG_HPP
