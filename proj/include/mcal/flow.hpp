#ifndef MCAL_FLOW_HPP
#define MCAL_FLOW_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pattern.hpp"

namespace mcal {

// A successor function f from roots to centers, together with a composition
// order for the star geometries (L front-loads the last layer found).
struct StarDecomp {
    std::map<QubitId, QubitId> f;
    std::vector<QubitId> L;
    std::map<QubitId, int> layer; // peeling round in which each root was found
};

namespace detail {

inline std::map<QubitId, std::set<QubitId>> adjacency(const Geometry& g) {
    std::map<QubitId, std::set<QubitId>> adj;
    for (const auto& v : g.vertices) adj[v];
    for (const auto& e : g.edges) {
        adj[e.first].insert(e.second);
        adj[e.second].insert(e.first);
    }
    return adj;
}

// Layer-by-layer peeling. Vertices in `mediators` may be both root and
// center of their star; if `xy_only` is given, roots found through a center
// distinct from themselves must belong to it.
inline std::optional<StarDecomp> find_star_decomp(const Geometry& g,
                                                  const std::set<QubitId>& mediators_in,
                                                  const std::set<QubitId>* xy_only) {
    // the successor function maps into the non-inputs, so an input vertex
    // can never be its own center
    std::set<QubitId> mediators;
    for (const auto& v : mediators_in)
        if (!g.inputs.count(v)) mediators.insert(v);
    auto adj = adjacency(g);
    std::map<QubitId, std::set<QubitId>> out; // arcs v -> w for w not an output
    std::map<QubitId, std::set<QubitId>> in;
    std::set<QubitId> W;
    std::set<QubitId> S;
    for (const auto& v : g.vertices) {
        for (const auto& w : adj[v]) {
            if (!g.outputs.count(w)) {
                out[v].insert(w);
                in[w].insert(v);
            }
        }
        if (g.outputs.count(v)) {
            if (!g.inputs.count(v)) S.insert(v);
        } else {
            W.insert(v);
        }
    }
    // a mediator whose neighbors are all outputs starts with no outbound
    // arcs, so it is a root-and-center candidate from the first layer
    for (const auto& v : W) {
        if (mediators.count(v) && out[v].empty()) S.insert(v);
    }

    StarDecomp d;
    std::vector<QubitId> insertion; // L is this, reversed
    bool empty_layer = false;
    std::set<QubitId> next;
    int round = 0;

    auto remove_star_geom = [&](const QubitId& v, const QubitId& w) {
        empty_layer = false;
        W.erase(v);
        d.f[v] = w;
        d.layer[v] = round;
        insertion.push_back(v);
        for (const auto& z : in[v]) {
            out[z].erase(v);
            if (mediators.count(z) && W.count(z) && out[z].empty()) next.insert(z);
        }
        in[v].clear();
    };

    do {
        empty_layer = true;
        next.clear();
        ++round;
        for (const auto& w : S) {
            if (W.count(w)) {
                remove_star_geom(w, w);
            } else if (out[w].size() == 1 &&
                       (!xy_only || xy_only->count(*out[w].begin()))) {
                QubitId v = *out[w].begin();
                remove_star_geom(v, w);
                if (!g.inputs.count(v)) next.insert(v);
            } else {
                next.insert(w);
            }
        }
        S = next;
    } while (!empty_layer);

    if (!W.empty()) return std::nullopt;
    std::reverse(insertion.begin(), insertion.end());
    d.L = std::move(insertion);
    return d;
}

} // namespace detail

// M holds the qubits which may be both root and center (in patterns, those
// measured at +pi/2).
inline std::optional<StarDecomp> find_mod_star_decomp(const Geometry& g,
                                                      const std::set<QubitId>& M) {
    return detail::find_star_decomp(g, M, nullptr);
}

// Planes partition the measured qubits: YZ qubits are necessarily both root
// and center, and centers distinct from their root must serve XY roots.
inline std::optional<StarDecomp> find_extended_star_decomp(const Geometry& g,
                                                           const std::set<QubitId>& m_xy,
                                                           const std::set<QubitId>& m_yz) {
    return detail::find_star_decomp(g, m_yz, &m_xy);
}

// v <= w relation generated by v <= f(v) and (w ~ f(v) => v <= w), closed
// reflexively and transitively.
inline std::map<QubitId, std::set<QubitId>>
natural_preorder(const Geometry& g, const std::map<QubitId, QubitId>& f) {
    auto adj = detail::adjacency(g);
    std::map<QubitId, std::set<QubitId>> le;
    for (const auto& v : g.vertices) le[v].insert(v);
    for (const auto& [v, fv] : f) {
        le[v].insert(fv);
        for (const auto& w : adj[fv]) le[v].insert(w);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [v, ups] : le) {
            std::set<QubitId> add;
            for (const auto& w : ups) {
                for (const auto& x : le[w]) {
                    if (!ups.count(x)) add.insert(x);
                }
            }
            if (!add.empty()) {
                ups.insert(add.begin(), add.end());
                changed = true;
            }
        }
    }
    return le;
}

// Check the definition directly: f injective from measured qubits into
// non-inputs, centers adjacent to (or equal to, for mediators) their roots,
// and an antisymmetric natural pre-order.
inline bool is_modified_flow(const Geometry& g, const std::set<QubitId>& M,
                             const std::map<QubitId, QubitId>& f) {
    std::set<QubitId> measured;
    for (const auto& v : g.vertices)
        if (!g.outputs.count(v)) measured.insert(v);
    if (f.size() != measured.size()) return false;
    std::set<QubitId> image;
    for (const auto& [v, fv] : f) {
        if (!measured.count(v)) return false;
        if (g.inputs.count(fv)) return false;
        if (!image.insert(fv).second) return false;
        if (fv == v) {
            if (!M.count(v)) return false;
        } else if (!g.adjacent(v, fv)) {
            return false;
        }
    }
    auto le = natural_preorder(g, f);
    for (const auto& [v, ups] : le) {
        for (const auto& w : ups) {
            if (!(w == v) && le[w].count(v)) return false;
        }
    }
    return true;
}

// Exhaustive search over successor functions; for small geometries only.
inline std::optional<std::map<QubitId, QubitId>>
brute_force_mod_flow(const Geometry& g, const std::set<QubitId>& M) {
    std::vector<QubitId> measured;
    for (const auto& v : g.vertices)
        if (!g.outputs.count(v)) measured.push_back(v);
    std::vector<QubitId> targets;
    for (const auto& v : g.vertices)
        if (!g.inputs.count(v)) targets.push_back(v);
    std::map<QubitId, QubitId> f;
    std::set<QubitId> used;
    std::optional<std::map<QubitId, QubitId>> found;
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == measured.size()) {
            if (is_modified_flow(g, M, f)) {
                found = f;
                return true;
            }
            return false;
        }
        const QubitId& v = measured[i];
        for (const auto& t : targets) {
            if (used.count(t)) continue;
            bool ok = (t == v) ? M.count(v) != 0 : g.adjacent(v, t);
            if (!ok) continue;
            f[v] = t;
            used.insert(t);
            if (self(self, i + 1)) return true;
            used.erase(t);
            f.erase(v);
        }
        return false;
    };
    rec(rec, 0);
    return found;
}

// m <= nk - k(k+1)/2 holds whenever a modified flow exists, for k = |O|.
inline bool edge_bound_ok(std::size_t n, std::size_t k, std::size_t m) {
    return m <= n * k - (k * (k + 1)) / 2;
}

} // namespace mcal

#endif
