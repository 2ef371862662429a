#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace anb {

// Set of variable indices as a bitmask. Capacity 32, variable 0 is the class.
struct VarSet {
    std::uint32_t bits = 0;

    constexpr VarSet() = default;
    constexpr explicit VarSet(std::uint32_t mask) : bits(mask) {}

    static constexpr VarSet of(std::initializer_list<int> vs) {
        VarSet s;
        for (int v : vs) s.bits |= (1u << v);
        return s;
    }
    // {0, 1, ..., n-1}
    static constexpr VarSet all_below(int n) {
        return VarSet(n >= 32 ? 0xffffffffu : ((1u << n) - 1u));
    }

    constexpr bool empty() const { return bits == 0; }
    constexpr int size() const { return std::popcount(bits); }
    constexpr bool contains(int v) const { return (bits >> v) & 1u; }
    constexpr VarSet with(int v) const { return VarSet(bits | (1u << v)); }
    constexpr VarSet without(int v) const { return VarSet(bits & ~(1u << v)); }
    constexpr bool subset_of(VarSet o) const { return (bits & ~o.bits) == 0; }
    constexpr int lowest() const { return std::countr_zero(bits); }

    friend constexpr VarSet operator|(VarSet a, VarSet b) { return VarSet(a.bits | b.bits); }
    friend constexpr VarSet operator&(VarSet a, VarSet b) { return VarSet(a.bits & b.bits); }
    friend constexpr VarSet operator-(VarSet a, VarSet b) { return VarSet(a.bits & ~b.bits); }
    friend constexpr bool operator==(VarSet a, VarSet b) { return a.bits == b.bits; }
    friend constexpr bool operator!=(VarSet a, VarSet b) { return a.bits != b.bits; }

    std::vector<int> members() const {
        std::vector<int> out;
        out.reserve(size());
        for (std::uint32_t m = bits; m; m &= m - 1) out.push_back(std::countr_zero(m));
        return out;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::uint32_t m = bits; m; m &= m - 1) fn(std::countr_zero(m));
    }

    std::string str() const {
        std::string s = "{";
        bool first = true;
        for_each([&](int v) {
            if (!first) s += ",";
            s += std::to_string(v);
            first = false;
        });
        return s + "}";
    }
};

// Rank of `sub` within the family of subsets of `allowed`; inverse of expand_bits.
// Subsets enumerate in ascending rank = ascending bitmask order over the family.
inline std::uint32_t compress_bits(std::uint32_t sub, std::uint32_t allowed) {
    if (sub & ~allowed) throw std::invalid_argument("compress_bits: set not within family");
    std::uint32_t out = 0;
    int pos = 0;
    for (std::uint32_t m = allowed; m; m &= m - 1) {
        std::uint32_t bit = m & (~m + 1u);
        if (sub & bit) out |= (1u << pos);
        ++pos;
    }
    return out;
}

inline std::uint32_t expand_bits(std::uint32_t rank, std::uint32_t allowed) {
    std::uint32_t out = 0;
    int pos = 0;
    for (std::uint32_t m = allowed; m; m &= m - 1) {
        std::uint32_t bit = m & (~m + 1u);
        if ((rank >> pos) & 1u) out |= bit;
        ++pos;
    }
    if (rank >> pos) throw std::invalid_argument("expand_bits: rank out of range");
    return out;
}

// Drop one bit position from a compact mask: bits above `pos` shift down by one.
inline std::uint32_t squeeze_bit(std::uint32_t mask, int pos) {
    std::uint32_t low = mask & ((1u << pos) - 1u);
    return low | ((mask >> (pos + 1)) << pos);
}

}  // namespace anb
