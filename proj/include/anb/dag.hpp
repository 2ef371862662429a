#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "anb/varset.hpp"

namespace anb {

// Acyclic parent-set assignment per variable. Acyclicity is checked on
// construction, so every instance in flight is a valid DAG.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::vector<VarSet> parent_sets) : parents_(std::move(parent_sets)) {
        for (std::size_t i = 0; i < parents_.size(); ++i)
            if (parents_[i].contains(static_cast<int>(i)))
                throw std::invalid_argument("dag: self-loop at variable " + std::to_string(i));
        if (topo_order_or_empty().empty() && !parents_.empty())
            throw std::invalid_argument("dag: parent assignment contains a cycle");
    }

    int n() const { return static_cast<int>(parents_.size()); }
    VarSet parents(int v) const { return parents_[v]; }
    const std::vector<VarSet>& parent_sets() const { return parents_; }

    bool has_edge(int from, int to) const { return parents_[to].contains(from); }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    VarSet children(int v) const {
        VarSet c;
        for (int i = 0; i < n(); ++i)
            if (parents_[i].contains(v)) c = c.with(i);
        return c;
    }

    int edge_count() const {
        int e = 0;
        for (const auto& p : parents_) e += p.size();
        return e;
    }

    // Kahn's algorithm, lowest ready index first: a single deterministic order.
    std::vector<int> topo_order() const {
        auto order = topo_order_or_empty();
        if (order.empty() && n() > 0) throw std::logic_error("dag: cycle");
        return order;
    }

    VarSet descendants(int v) const {
        VarSet seen;
        std::deque<int> queue{v};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            children(u).for_each([&](int c) {
                if (!seen.contains(c)) {
                    seen = seen.with(c);
                    queue.push_back(c);
                }
            });
        }
        return seen;
    }

    bool satisfies_anb() const {
        if (!parents_[0].empty()) return false;
        for (int i = 1; i < n(); ++i)
            if (!parents_[i].contains(0)) return false;
        return true;
    }

    friend bool operator==(const Dag& a, const Dag& b) { return a.parents_ == b.parents_; }

private:
    std::vector<VarSet> parents_;

    std::vector<int> topo_order_or_empty() const {
        int nn = n();
        std::vector<int> indeg(nn, 0);
        for (int i = 0; i < nn; ++i) indeg[i] = parents_[i].size();
        VarSet ready;
        for (int i = 0; i < nn; ++i)
            if (indeg[i] == 0) ready = ready.with(i);
        std::vector<int> order;
        order.reserve(nn);
        while (!ready.empty()) {
            int u = ready.lowest();
            ready = ready.without(u);
            order.push_back(u);
            children(u).for_each([&](int c) {
                if (--indeg[c] == 0) ready = ready.with(c);
            });
        }
        if (static_cast<int>(order.size()) != nn) return {};
        return order;
    }
};

// d-separation via the two-phase reachability algorithm over active trails:
// collect ancestors of the conditioning set, then walk (node, entry-direction)
// states. Matches path-enumeration semantics (property-tested).
inline bool d_separated(const Dag& g, int x, int y, VarSet z) {
    if (x == y) throw std::invalid_argument("d_separated: x == y");
    if (z.contains(x) || z.contains(y))
        throw std::invalid_argument("d_separated: conditioning set contains an endpoint");

    // ancestors of z, including z itself
    VarSet anc = z;
    std::deque<int> queue;
    z.for_each([&](int v) { queue.push_back(v); });
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        g.parents(u).for_each([&](int p) {
            if (!anc.contains(p)) {
                anc = anc.with(p);
                queue.push_back(p);
            }
        });
    }

    // state: node + whether we entered along an incoming edge (from a parent)
    constexpr int kFromParent = 0, kFromChild = 1;
    std::vector<std::array<bool, 2>> visited(g.n(), {false, false});
    std::deque<std::pair<int, int>> frontier;
    frontier.push_back({x, kFromChild});  // start acts like entry from a child
    visited[x][kFromChild] = true;

    while (!frontier.empty()) {
        auto [u, dir] = frontier.front();
        frontier.pop_front();
        if (u == y) return false;

        auto visit = [&](int v, int d) {
            if (!visited[v][d]) {
                visited[v][d] = true;
                frontier.push_back({v, d});
            }
        };
        if (dir == kFromChild) {
            if (!z.contains(u)) {
                g.parents(u).for_each([&](int p) { visit(p, kFromChild); });
                g.children(u).for_each([&](int c) { visit(c, kFromParent); });
            }
        } else {
            if (!z.contains(u)) g.children(u).for_each([&](int c) { visit(c, kFromParent); });
            if (anc.contains(u)) g.parents(u).for_each([&](int p) { visit(p, kFromChild); });
        }
    }
    return true;
}

inline VarSet markov_blanket(const Dag& g, int v) {
    VarSet mb = g.parents(v);
    VarSet kids = g.children(v);
    mb = mb | kids;
    kids.for_each([&](int c) { mb = mb | g.parents(c); });
    return mb.without(v);
}

namespace detail {

// v-structures a->c<-b with non-adjacent a, b, canonical a < b
inline std::vector<std::array<int, 3>> v_structures(const Dag& g) {
    std::vector<std::array<int, 3>> out;
    for (int c = 0; c < g.n(); ++c) {
        auto ps = g.parents(c).members();
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j)
                if (!g.adjacent(ps[i], ps[j])) out.push_back({ps[i], ps[j], c});
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::pair<int, int>> skeleton(const Dag& g) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < g.n(); ++v)
        g.parents(v).for_each([&](int p) {
            edges.push_back({std::min(p, v), std::max(p, v)});
        });
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace detail

// identical links and identical convergence connections
inline bool markov_equivalent(const Dag& g1, const Dag& g2) {
    if (g1.n() != g2.n()) throw std::invalid_argument("markov_equivalent: size mismatch");
    return detail::skeleton(g1) == detail::skeleton(g2) &&
           detail::v_structures(g1) == detail::v_structures(g2);
}

// Structural Hamming distance at the DAG level: one per edge present in only
// one skeleton, one per shared edge with opposite orientation.
inline int shd(const Dag& g1, const Dag& g2) {
    if (g1.n() != g2.n()) throw std::invalid_argument("shd: size mismatch");
    int d = 0;
    for (int a = 0; a < g1.n(); ++a)
        for (int b = a + 1; b < g1.n(); ++b) {
            bool in1 = g1.adjacent(a, b), in2 = g2.adjacent(a, b);
            if (in1 != in2)
                ++d;
            else if (in1 && g1.has_edge(a, b) != g2.has_edge(a, b))
                ++d;
        }
    return d;
}

// Classification-equivalence transform: make the class's parents pairwise
// adjacent (new edges oriented along a topological order of the input), then
// reverse every edge into the class variable.
inline Dag anb_transform(const Dag& g) {
    auto order = g.topo_order();
    std::vector<int> pos(g.n());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);

    auto parents = g.parent_sets();
    auto pa0 = g.parents(0).members();
    for (std::size_t i = 0; i < pa0.size(); ++i)
        for (std::size_t j = i + 1; j < pa0.size(); ++j) {
            int a = pa0[i], b = pa0[j];
            if (!g.adjacent(a, b)) {
                if (pos[a] > pos[b]) std::swap(a, b);
                parents[b] = parents[b].with(a);
            }
        }
    g.parents(0).for_each([&](int p) { parents[p] = parents[p].with(0); });
    parents[0] = VarSet();
    return Dag(parents);
}

inline nlohmann::json dag_to_json(const Dag& g, const std::vector<std::string>& names) {
    nlohmann::json parents = nlohmann::json::array();
    for (int v = 0; v < g.n(); ++v) {
        nlohmann::json plist = nlohmann::json::array();
        g.parents(v).for_each([&](int p) { plist.push_back(names[p]); });
        parents.push_back(plist);
    }
    return nlohmann::json{
        {"format", "anb.dag"}, {"version", 1}, {"names", names}, {"parents", parents}};
}

inline Dag dag_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "anb.dag") throw std::invalid_argument("not an anb.dag file");
    auto names = j.at("names").get<std::vector<std::string>>();
    auto index_of = [&](const std::string& n) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
        throw std::invalid_argument("dag_from_json: unknown variable '" + n + "'");
    };
    std::vector<VarSet> parents(names.size());
    const auto& jp = j.at("parents");
    for (std::size_t v = 0; v < names.size(); ++v)
        for (const auto& pn : jp.at(v)) parents[v] = parents[v].with(index_of(pn.get<std::string>()));
    return Dag(parents);
}

inline std::string dag_to_dot(const Dag& g, const std::vector<std::string>& names) {
    std::string out = "digraph {\n";
    for (int v = 0; v < g.n(); ++v) out += "  \"" + names[v] + "\";\n";
    for (int v = 0; v < g.n(); ++v)
        g.parents(v).for_each(
            [&](int p) { out += "  \"" + names[p] + "\" -> \"" + names[v] + "\";\n"; });
    return out + "}\n";
}

}  // namespace anb
