#include "bsbo/constraint_space.hpp"

#include <algorithm>
#include <array>

namespace bsbo {

GroundSet::GroundSet(std::vector<std::string> alphabets) : alphabets_(std::move(alphabets)) {
    if (alphabets_.empty()) throw ConfigError("ground set needs at least one site");
    offsets_.reserve(alphabets_.size());
    strides_.assign(alphabets_.size(), 1);
    int offset = 0;
    for (std::size_t site = 0; site < alphabets_.size(); ++site) {
        const std::string& alpha = alphabets_[site];
        if (alpha.empty())
            throw ConfigError("site " + std::to_string(site) + " has an empty alphabet");
        if (alpha.size() > 64)
            throw ConfigError("site " + std::to_string(site) + " alphabet exceeds 64 symbols");
        std::array<bool, 256> seen{};
        for (char c : alpha) {
            auto& flag = seen[static_cast<unsigned char>(c)];
            if (flag)
                throw ConfigError("site " + std::to_string(site) +
                                  " alphabet has duplicate symbol '" + std::string(1, c) + "'");
            flag = true;
        }
        offsets_.push_back(offset);
        offset += static_cast<int>(alpha.size());
    }
    total_constraints_ = offset;

    capacity_ = 1;
    for (std::size_t site = alphabets_.size(); site-- > 0;) {
        strides_[site] = capacity_;
        const auto width = static_cast<std::uint64_t>(alphabets_[site].size());
        if (capacity_ > (std::uint64_t{1} << 62) / width)
            throw ConfigError("ground set library capacity overflows");
        capacity_ *= width;
    }
}

int GroundSet::site_of(int constraint) const {
    // offsets_ is small (a handful of sites); linear scan.
    int site = static_cast<int>(offsets_.size()) - 1;
    while (site > 0 && offsets_[static_cast<std::size_t>(site)] > constraint) --site;
    return site;
}

std::uint64_t GroundSet::item_index(const Item& item) const {
    std::uint64_t index = 0;
    for (std::size_t site = 0; site < alphabets_.size(); ++site)
        index += static_cast<std::uint64_t>(item.symbols[site]) * strides_[site];
    return index;
}

Item GroundSet::item_at(std::uint64_t index) const {
    Item item;
    item.symbols.resize(alphabets_.size());
    for (std::size_t site = 0; site < alphabets_.size(); ++site) {
        item.symbols[site] = static_cast<std::uint8_t>(index / strides_[site]);
        index %= strides_[site];
    }
    return item;
}

std::string GroundSet::sequence_of(const Item& item) const {
    std::string seq(alphabets_.size(), '?');
    for (std::size_t site = 0; site < alphabets_.size(); ++site)
        seq[site] = alphabets_[site][item.symbols[site]];
    return seq;
}

Item GroundSet::item_from_sequence(std::string_view seq) const {
    if (seq.size() != alphabets_.size())
        throw DataError("sequence '" + std::string(seq) + "' has length " +
                        std::to_string(seq.size()) + ", expected " + std::to_string(alphabets_.size()));
    Item item;
    item.symbols.resize(alphabets_.size());
    for (std::size_t site = 0; site < alphabets_.size(); ++site) {
        const auto pos = alphabets_[site].find(seq[site]);
        if (pos == std::string::npos)
            throw DataError("symbol '" + std::string(1, seq[site]) + "' at site " +
                            std::to_string(site) + " is not in the site alphabet");
        item.symbols[site] = static_cast<std::uint8_t>(pos);
    }
    return item;
}

ConstraintSet GroundSet::full_set() const {
    ConstraintSet s = empty_set();
    for (std::size_t site = 0; site < alphabets_.size(); ++site) {
        const auto width = alphabets_[site].size();
        s.masks[site] = (width == 64) ? ~SiteMask{0} : ((SiteMask{1} << width) - 1);
    }
    return s;
}

ConstraintSet GroundSet::singleton_set(const Item& item) const {
    ConstraintSet s = empty_set();
    for (std::size_t site = 0; site < alphabets_.size(); ++site)
        s.masks[site] = SiteMask{1} << item.symbols[site];
    return s;
}

std::uint64_t library_size(const GroundSet& ground, const ConstraintSet& s) {
    std::uint64_t size = 1;
    for (int site = 0; site < ground.num_sites(); ++site) {
        const auto width = static_cast<std::uint64_t>(s.count(site));
        if (width == 0) return 0;
        size *= width;
    }
    return size;
}

std::vector<std::vector<std::uint8_t>> selected_symbols(const GroundSet& ground, const ConstraintSet& s) {
    std::vector<std::vector<std::uint8_t>> sel(static_cast<std::size_t>(ground.num_sites()));
    for (int site = 0; site < ground.num_sites(); ++site) {
        SiteMask m = s.masks[static_cast<std::size_t>(site)];
        auto& list = sel[static_cast<std::size_t>(site)];
        list.reserve(static_cast<std::size_t>(std::popcount(m)));
        while (m != 0) {
            const int bit = std::countr_zero(m);
            list.push_back(static_cast<std::uint8_t>(bit));
            m &= m - 1;
        }
    }
    return sel;
}

Item library_item_at(const GroundSet& ground, const ConstraintSet& s, std::uint64_t k) {
    const auto sel = selected_symbols(ground, s);
    std::uint64_t radix = 1;
    for (const auto& list : sel) radix *= list.size();
    Item item;
    item.symbols.resize(sel.size());
    for (std::size_t site = 0; site < sel.size(); ++site) {
        radix /= sel[site].size();
        item.symbols[site] = sel[site][static_cast<std::size_t>(k / radix)];
        k %= radix;
    }
    return item;
}

std::vector<Item> enumerate_library(const GroundSet& ground, const ConstraintSet& s) {
    std::vector<Item> items;
    items.reserve(static_cast<std::size_t>(library_size(ground, s)));
    for_each_library_index(ground, s, [&](std::uint64_t index) { items.push_back(ground.item_at(index)); });
    return items;
}

std::vector<std::pair<int, ConstraintSet>> neighbors(const GroundSet& ground, const ConstraintSet& s) {
    std::vector<std::pair<int, ConstraintSet>> out;
    out.reserve(static_cast<std::size_t>(ground.total_constraints()));
    for (int j = 0; j < ground.total_constraints(); ++j) {
        ConstraintSet t = s;
        t.toggle(ground.site_of(j), ground.symbol_of(j));
        out.emplace_back(j, std::move(t));
    }
    return out;
}

bool is_subset(const ConstraintSet& a, const ConstraintSet& b) {
    for (std::size_t site = 0; site < a.masks.size(); ++site)
        if ((a.masks[site] & ~b.masks[site]) != 0) return false;
    return true;
}

} // namespace bsbo
