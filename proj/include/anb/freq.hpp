#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anb/dataset.hpp"
#include "anb/varset.hpp"

namespace anb {

// Joint configuration index: mixed radix over the set's members in ascending
// variable order, lowest index = most significant digit. 128 bits so that the
// index space of wide sets stays exact.
using ConfigKey = unsigned __int128;

// Joint frequency table over a variable set. Dense cell array when the index
// space is small, sorted (config, count) pairs otherwise.
class Jft {
public:
    static constexpr ConfigKey kDenseLimit = 1u << 18;

    VarSet vars;
    std::vector<int> arities;         // per member, ascending variable order
    std::uint64_t total = 0;

    static Jft tally(const Dataset& data, VarSet vs) {
        if (vs.empty()) throw std::invalid_argument("jft: empty variable set");
        Jft t;
        t.vars = vs;
        auto members = vs.members();
        for (int v : members) {
            if (v >= data.n_vars()) throw std::invalid_argument("jft: variable out of range");
            t.arities.push_back(data.arity(v));
        }
        t.init_space();
        for (const auto& row : data.rows) {
            ConfigKey j = 0;
            for (std::size_t p = 0; p < members.size(); ++p)
                j = j * static_cast<unsigned>(t.arities[p]) + row[members[p]];
            t.bump(j);
        }
        t.finish();
        return t;
    }

    // Sum out one member; total count is preserved.
    Jft marginalize(int drop) const {
        if (!vars.contains(drop)) throw std::invalid_argument("marginalize: variable not in set");
        if (vars.size() == 1) throw std::invalid_argument("marginalize: cannot drop last variable");
        Jft out;
        out.vars = vars.without(drop);
        int pos = member_pos(drop);
        for (std::size_t p = 0; p < arities.size(); ++p)
            if (static_cast<int>(p) != pos) out.arities.push_back(arities[p]);
        out.init_space();
        ConfigKey below = weight(pos);                       // product of radices after pos
        ConfigKey above = below * static_cast<unsigned>(arities[pos]);
        for_each_nonzero([&](ConfigKey j, std::uint32_t c) {
            out.bump((j / above) * below + (j % below), c);
        });
        out.finish();
        return out;
    }

    std::uint32_t count(const std::vector<int>& states) const {
        if (states.size() != arities.size()) throw std::invalid_argument("count: width mismatch");
        ConfigKey j = 0;
        for (std::size_t p = 0; p < states.size(); ++p)
            j = j * static_cast<unsigned>(arities[p]) + static_cast<unsigned>(states[p]);
        return at(j);
    }

    std::uint32_t at(ConfigKey j) const {
        if (dense_) return cells_[static_cast<std::size_t>(j)];
        auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                                   [](const Entry& e, ConfigKey k) { return e.key < k; });
        return (it != entries_.end() && it->key == j) ? it->count : 0;
    }

    template <typename Fn>
    void for_each_nonzero(Fn&& fn) const {
        if (dense_) {
            for (std::size_t j = 0; j < cells_.size(); ++j)
                if (cells_[j]) fn(static_cast<ConfigKey>(j), cells_[j]);
        } else {
            for (const auto& e : entries_) fn(e.key, e.count);
        }
    }

    double q() const {
        double p = 1.0;
        for (int r : arities) p *= r;
        return p;
    }

    int member_pos(int v) const {
        auto m = vars.members();
        for (std::size_t p = 0; p < m.size(); ++p)
            if (m[p] == v) return static_cast<int>(p);
        throw std::invalid_argument("member_pos: not a member");
    }

    // product of radices strictly after position pos
    ConfigKey weight(int pos) const {
        ConfigKey w = 1;
        for (std::size_t p = pos + 1; p < arities.size(); ++p)
            w *= static_cast<unsigned>(arities[p]);
        return w;
    }

private:
    struct Entry {
        ConfigKey key;
        std::uint32_t count;
    };
    bool dense_ = true;
    std::vector<std::uint32_t> cells_;
    std::vector<Entry> staged_;       // unsorted accumulation for sparse mode
    std::vector<Entry> entries_;      // sorted, deduplicated

    void init_space() {
        ConfigKey qk = 1;
        bool overflow = false;
        for (int r : arities) {
            if (qk > (~static_cast<ConfigKey>(0)) / static_cast<unsigned>(r)) overflow = true;
            if (!overflow) qk *= static_cast<unsigned>(r);
        }
        if (overflow) throw std::invalid_argument("jft: configuration space exceeds 128 bits");
        dense_ = qk <= kDenseLimit;
        if (dense_) cells_.assign(static_cast<std::size_t>(qk), 0);
    }

    void bump(ConfigKey j, std::uint32_t c = 1) {
        total += c;
        if (dense_)
            cells_[static_cast<std::size_t>(j)] += c;
        else
            staged_.push_back({j, c});
    }

    void finish() {
        if (dense_) return;
        std::sort(staged_.begin(), staged_.end(),
                  [](const Entry& a, const Entry& b) { return a.key < b.key; });
        entries_.clear();
        for (const auto& e : staged_) {
            if (!entries_.empty() && entries_.back().key == e.key)
                entries_.back().count += e.count;
            else
                entries_.push_back(e);
        }
        staged_.clear();
        staged_.shrink_to_fit();
    }

    friend class Cft;
};

// Conditional frequency table: counts of the child per parent configuration.
// Only parent configurations with data are materialized; absent ones carry
// zero counts and never contribute to scores.
class Cft {
public:
    int child = -1;
    int r_child = 0;
    VarSet parents;
    double q_parents = 1.0;           // number of parent configurations
    std::uint64_t total = 0;

    std::vector<ConfigKey> pconfigs;  // sorted parent configs with N_j > 0
    std::vector<std::uint32_t> counts;  // pconfigs.size() x r_child, row-major

    std::size_t n_rows() const { return pconfigs.size(); }
    std::uint32_t count(std::size_t row, int k) const { return counts[row * r_child + k]; }
    std::uint64_t row_total(std::size_t row) const {
        std::uint64_t s = 0;
        for (int k = 0; k < r_child; ++k) s += count(row, k);
        return s;
    }
};

// Reindex a joint table as child-given-rest. Parent configuration indices use
// the same ascending mixed-radix convention as Jft.
inline Cft jft_to_cft(const Jft& jft, int child) {
    if (!jft.vars.contains(child)) throw std::invalid_argument("jft_to_cft: child not in set");
    Cft cft;
    cft.child = child;
    cft.parents = jft.vars.without(child);
    int pos = jft.member_pos(child);
    cft.r_child = jft.arities[pos];
    cft.total = jft.total;
    cft.q_parents = 1.0;
    for (std::size_t p = 0; p < jft.arities.size(); ++p)
        if (static_cast<int>(p) != pos) cft.q_parents *= jft.arities[p];

    ConfigKey below = jft.weight(pos);
    ConfigKey above = below * static_cast<unsigned>(cft.r_child);
    struct Tmp {
        ConfigKey pj;
        int k;
        std::uint32_t c;
    };
    std::vector<Tmp> tmp;
    jft.for_each_nonzero([&](ConfigKey j, std::uint32_t c) {
        ConfigKey pj = (j / above) * below + (j % below);
        int k = static_cast<int>((j / below) % static_cast<unsigned>(cft.r_child));
        tmp.push_back({pj, k, c});
    });
    std::stable_sort(tmp.begin(), tmp.end(),
                     [](const Tmp& a, const Tmp& b) { return a.pj < b.pj; });
    for (const auto& t : tmp) {
        if (cft.pconfigs.empty() || cft.pconfigs.back() != t.pj) {
            cft.pconfigs.push_back(t.pj);
            cft.counts.resize(cft.counts.size() + cft.r_child, 0);
        }
        cft.counts[(cft.pconfigs.size() - 1) * cft.r_child + t.k] += t.c;
    }
    return cft;
}

inline Jft jft(const Dataset& data, VarSet vs) { return Jft::tally(data, vs); }

inline Jft jft_marginalize(const Jft& t, int drop) { return t.marginalize(drop); }

}  // namespace anb
