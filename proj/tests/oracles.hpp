// Test-side brute-force oracles, kept independent of the library's own
// validation code paths.
#ifndef BSBO_TESTS_ORACLES_HPP
#define BSBO_TESTS_ORACLES_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "bsbo/constraint_space.hpp"

namespace oracles {

inline bsbo::ConstraintSet set_from_mask(const bsbo::GroundSet& ground, std::uint32_t mask) {
    bsbo::ConstraintSet s = ground.empty_set();
    for (int j = 0; j < ground.total_constraints(); ++j)
        if ((mask >> j) & 1U) s.add(ground.site_of(j), ground.symbol_of(j));
    return s;
}

inline std::vector<double> table_over_subsets(
    const bsbo::GroundSet& ground, const std::function<double(const bsbo::ConstraintSet&)>& fn) {
    std::vector<double> table(std::size_t{1} << ground.total_constraints());
    for (std::uint32_t mask = 0; mask < table.size(); ++mask)
        table[mask] = fn(set_from_mask(ground, mask));
    return table;
}

struct Extremum {
    std::uint32_t mask = 0;
    double value = -std::numeric_limits<double>::infinity();
};

inline Extremum exhaustive_max(const std::vector<double>& table) {
    Extremum best;
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
        if (table[mask] > best.value) {
            best.value = table[mask];
            best.mask = mask;
        }
    }
    return best;
}

// Worst diminishing-returns violation: max over (S, j, k) of
// Delta(j | S + k) - Delta(j | S). Submodular functions keep this <= 0.
inline double worst_submodularity_violation(const std::vector<double>& table, int m) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
        for (int j = 0; j < m; ++j) {
            const std::uint32_t bit_j = 1U << j;
            if (mask & bit_j) continue;
            for (int k = 0; k < m; ++k) {
                const std::uint32_t bit_k = 1U << k;
                if (k == j || (mask & bit_k)) continue;
                const double small = table[mask | bit_j] - table[mask];
                const double large = table[mask | bit_k | bit_j] - table[mask | bit_k];
                worst = std::max(worst, large - small);
            }
        }
    }
    return worst;
}

// Exact beta = min over j and chains S <= S' <= C \ {j} of
// Delta(j|S) - Delta(j|S'), by direct enumeration of subset pairs.
inline double exhaustive_beta(const std::vector<double>& table, int m) {
    double beta = std::numeric_limits<double>::infinity();
    const auto count = static_cast<std::uint32_t>(table.size());
    for (int j = 0; j < m; ++j) {
        const std::uint32_t bit_j = 1U << j;
        for (std::uint32_t small = 0; small < count; ++small) {
            if (small & bit_j) continue;
            const double gain_small = table[small | bit_j] - table[small];
            for (std::uint32_t large = small; large < count; ++large) {
                if ((large & bit_j) || (small & ~large)) continue;
                const double gain_large = table[large | bit_j] - table[large];
                beta = std::min(beta, gain_small - gain_large);
            }
        }
    }
    return beta;
}

} // namespace oracles

#endif // BSBO_TESTS_ORACLES_HPP
