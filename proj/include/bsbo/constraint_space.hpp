#ifndef BSBO_CONSTRAINT_SPACE_HPP
#define BSBO_CONSTRAINT_SPACE_HPP

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bsbo/errors.hpp"

namespace bsbo {

/// One point of the product space: a symbol choice per site.
struct Item {
    std::vector<std::uint8_t> symbols;

    auto operator<=>(const Item&) const = default;
};

/// A subset of one site's alphabet, as a bit mask over symbol indices.
using SiteMask = std::uint64_t;

/// Per-site selection S. Constraint j = (site, symbol) pairs are indexed
/// globally with site 0's alphabet first.
struct ConstraintSet {
    std::vector<SiteMask> masks;

    bool contains(int site, int symbol) const {
        return (masks[static_cast<std::size_t>(site)] >> symbol) & 1ULL;
    }
    void add(int site, int symbol) { masks[static_cast<std::size_t>(site)] |= (1ULL << symbol); }
    void remove(int site, int symbol) { masks[static_cast<std::size_t>(site)] &= ~(1ULL << symbol); }
    void toggle(int site, int symbol) { masks[static_cast<std::size_t>(site)] ^= (1ULL << symbol); }

    int count(int site) const { return std::popcount(masks[static_cast<std::size_t>(site)]); }

    int total() const {
        int t = 0;
        for (SiteMask m : masks) t += std::popcount(m);
        return t;
    }

    bool any_site_empty() const {
        for (SiteMask m : masks)
            if (m == 0) return true;
        return false;
    }

    bool operator==(const ConstraintSet&) const = default;
};

/// Fixed design space: L sites, each with its own symbol alphabet.
/// Immutable after construction; all member queries are pure.
class GroundSet {
public:
    GroundSet() = default;

    /// Alphabets are character strings, one per site; each must be non-empty
    /// and duplicate-free, with at most 64 symbols (mask width).
    explicit GroundSet(std::vector<std::string> alphabets);

    int num_sites() const { return static_cast<int>(alphabets_.size()); }
    const std::string& alphabet(int site) const { return alphabets_[static_cast<std::size_t>(site)]; }
    const std::vector<std::string>& alphabets() const { return alphabets_; }

    /// |C| = total number of (site, symbol) constraints.
    int total_constraints() const { return total_constraints_; }

    /// |Q(C)| = number of items in the full-factorial library.
    std::uint64_t library_capacity() const { return capacity_; }

    // Global constraint index <-> (site, symbol index).
    int constraint_index(int site, int symbol) const {
        return offsets_[static_cast<std::size_t>(site)] + symbol;
    }
    int site_of(int constraint) const;
    int symbol_of(int constraint) const {
        return constraint - offsets_[static_cast<std::size_t>(site_of(constraint))];
    }
    char symbol_char(int constraint) const {
        const int site = site_of(constraint);
        return alphabets_[static_cast<std::size_t>(site)][static_cast<std::size_t>(constraint - offsets_[static_cast<std::size_t>(site)])];
    }

    // Item <-> dense library index, mixed radix with site 0 most significant.
    std::uint64_t item_index(const Item& item) const;
    Item item_at(std::uint64_t index) const;

    std::string sequence_of(const Item& item) const;
    /// Parses a sequence string; throws DataError on bad length or symbol.
    Item item_from_sequence(std::string_view seq) const;

    ConstraintSet empty_set() const { return ConstraintSet{std::vector<SiteMask>(alphabets_.size(), 0)}; }
    ConstraintSet full_set() const;
    /// The minimal set whose library is exactly {item}.
    ConstraintSet singleton_set(const Item& item) const;

    const std::vector<std::uint64_t>& strides() const { return strides_; }

    bool operator==(const GroundSet&) const = default;

private:
    std::vector<std::string> alphabets_;
    std::vector<int> offsets_;            // constraint index of each site's first symbol
    std::vector<std::uint64_t> strides_;  // mixed-radix strides, site 0 most significant
    std::uint64_t capacity_ = 0;
    int total_constraints_ = 0;
};

/// |Q(S)| = prod of per-site selection sizes; 0 if any site is empty.
std::uint64_t library_size(const GroundSet& ground, const ConstraintSet& s);

/// Ascending symbol indices selected at each site.
std::vector<std::vector<std::uint8_t>> selected_symbols(const GroundSet& ground, const ConstraintSet& s);

/// Decodes the k-th item of Q(S) in mixed-radix enumeration order without
/// materializing the library.
Item library_item_at(const GroundSet& ground, const ConstraintSet& s, std::uint64_t k);

/// Visits every library index of Q(S) in deterministic mixed-radix order
/// (site 0 most significant). Empty-site sets yield nothing.
template <typename Fn>
void for_each_library_index(const GroundSet& ground, const ConstraintSet& s, Fn&& fn) {
    const int sites = ground.num_sites();
    if (sites == 0) return;
    std::vector<std::vector<std::uint8_t>> sel = selected_symbols(ground, s);
    for (const auto& list : sel)
        if (list.empty()) return;

    const std::vector<std::uint64_t>& stride = ground.strides();
    std::vector<std::size_t> digit(static_cast<std::size_t>(sites), 0);
    std::uint64_t index = 0;
    for (int site = 0; site < sites; ++site)
        index += static_cast<std::uint64_t>(sel[static_cast<std::size_t>(site)][0]) * stride[static_cast<std::size_t>(site)];

    while (true) {
        fn(index);
        int site = sites - 1;
        while (site >= 0) {
            auto& list = sel[static_cast<std::size_t>(site)];
            std::size_t& d = digit[static_cast<std::size_t>(site)];
            if (d + 1 < list.size()) {
                index += static_cast<std::uint64_t>(list[d + 1] - list[d]) * stride[static_cast<std::size_t>(site)];
                ++d;
                break;
            }
            index -= static_cast<std::uint64_t>(list[d] - list[0]) * stride[static_cast<std::size_t>(site)];
            d = 0;
            --site;
        }
        if (site < 0) return;
    }
}

/// Materialized Q(S); intended for small libraries and tests.
std::vector<Item> enumerate_library(const GroundSet& ground, const ConstraintSet& s);

/// All |C| single-constraint toggles of S, in constraint-index order.
std::vector<std::pair<int, ConstraintSet>> neighbors(const GroundSet& ground, const ConstraintSet& s);

bool is_subset(const ConstraintSet& a, const ConstraintSet& b);

struct ConstraintSetHash {
    std::size_t operator()(const ConstraintSet& s) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (SiteMask m : s.masks) {
            h ^= m;
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace bsbo

#endif // BSBO_CONSTRAINT_SPACE_HPP
