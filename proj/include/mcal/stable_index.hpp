#ifndef MCAL_STABLE_INDEX_HPP
#define MCAL_STABLE_INDEX_HPP

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "angle.hpp"
#include "pattern.hpp"
#include "qubit.hpp"

namespace mcal {

// Tensor index v_j: generation j of qubit wire v.
struct IndexId {
    std::string qubit;
    int generation = 0;

    bool operator==(const IndexId& o) const {
        return generation == o.generation && qubit == o.qubit;
    }
    bool operator!=(const IndexId& o) const { return !(*this == o); }
    bool operator<(const IndexId& o) const {
        int c = natural_compare(qubit, o.qubit);
        if (c != 0) return c < 0;
        return generation < o.generation;
    }
    std::string str() const { return qubit + "." + std::to_string(generation); }
};

enum class TermGate { H, Tpow, J, CZ, ZZ, ZZZ, KetPlus, ProjPlusHalfPi };

struct Term {
    TermGate gate;
    int tpow = 0;                     // Tpow exponent
    Angle angle;                      // J, ZZZ
    std::vector<IndexId> stable;
    std::vector<IndexId> deprecated;
    std::vector<IndexId> advanced;

    bool same_gate(const Term& o) const {
        return gate == o.gate && tpow == o.tpow && angle == o.angle &&
               stable.size() == o.stable.size();
    }
    // stable lists of the diagonal multi-qubit gates are unordered
    bool symmetric_stable() const {
        return gate == TermGate::CZ || gate == TermGate::ZZ || gate == TermGate::ZZZ;
    }
};

struct StableIndexExpr {
    std::vector<Term> terms;
    std::vector<IndexId> free_in;   // never advanced
    std::vector<IndexId> free_out;  // never deprecated
};

// -------- circuits as flat gate lists --------

enum class CircuitGateKind { H, T, Tdg, CZ, ZZ, J, KetPlus };

struct CircuitGate {
    CircuitGateKind kind;
    Angle angle;   // J only
    QubitId a, b;  // b used by CZ/ZZ

    static CircuitGate g1(CircuitGateKind k, QubitId q) { return {k, Angle{}, std::move(q), {}}; }
    static CircuitGate g2(CircuitGateKind k, QubitId x, QubitId y) {
        return {k, Angle{}, std::move(x), std::move(y)};
    }
    static CircuitGate j(Angle t, QubitId q) {
        return {CircuitGateKind::J, t, std::move(q), {}};
    }
};

struct Circuit {
    std::vector<QubitId> inputs;
    std::vector<CircuitGate> gates;
};

// -------- construction of stable-index expressions --------

namespace detail {

struct IndexAlloc {
    std::map<std::string, int> current; // qubit -> current generation
    std::vector<IndexId> order;         // wire roots in first-use order

    IndexId cur(const QubitId& q) {
        auto it = current.find(q.name);
        if (it == current.end()) throw Error("UsedBeforePrepare", "qubit " + q.name);
        return {q.name, it->second};
    }
    IndexId advance(const QubitId& q) {
        auto it = current.find(q.name);
        if (it == current.end()) throw Error("UsedBeforePrepare", "qubit " + q.name);
        return {q.name, ++it->second};
    }
    IndexId fresh(const QubitId& q) {
        if (current.count(q.name)) throw Error("DuplicatePrepare", "qubit " + q.name);
        current[q.name] = 0;
        return {q.name, 0};
    }
};

} // namespace detail

inline StableIndexExpr from_gates_free(const Circuit& c) {
    StableIndexExpr e;
    detail::IndexAlloc ix;
    std::vector<QubitId> ins = c.inputs;
    std::sort(ins.begin(), ins.end());
    for (const auto& q : ins) e.free_in.push_back(ix.fresh(q));
    for (const CircuitGate& g : c.gates) {
        Term t{};
        switch (g.kind) {
        case CircuitGateKind::H:
            t.gate = TermGate::H;
            t.deprecated = {ix.cur(g.a)};
            t.advanced = {ix.advance(g.a)};
            break;
        case CircuitGateKind::J:
            t.gate = TermGate::J;
            t.angle = g.angle;
            t.deprecated = {ix.cur(g.a)};
            t.advanced = {ix.advance(g.a)};
            break;
        case CircuitGateKind::T:
        case CircuitGateKind::Tdg:
            t.gate = TermGate::Tpow;
            t.tpow = g.kind == CircuitGateKind::T ? 1 : -1;
            t.stable = {ix.cur(g.a)};
            break;
        case CircuitGateKind::CZ:
        case CircuitGateKind::ZZ:
            t.gate = g.kind == CircuitGateKind::CZ ? TermGate::CZ : TermGate::ZZ;
            t.stable = {ix.cur(g.a), ix.cur(g.b)};
            break;
        case CircuitGateKind::KetPlus:
            t.gate = TermGate::KetPlus;
            t.advanced = {ix.fresh(g.a)};
            break;
        }
        e.terms.push_back(std::move(t));
    }
    for (const auto& [q, gen] : ix.current) e.free_out.push_back({q, gen});
    return e;
}

// Grid-constrained construction for the simplified RBB pipeline: two-qubit
// gates only join indices of equal depth, with no ZZ on the immediately
// preceding index pair. Wire order for the nearest-neighbor check is the
// order of c.inputs.
struct InteractionGraph {
    std::set<IndexId> vertices;
    std::set<std::pair<IndexId, IndexId>> edges;

    void add_edge(IndexId a, IndexId b) {
        if (b < a) std::swap(a, b);
        vertices.insert(a);
        vertices.insert(b);
        edges.insert({std::move(a), std::move(b)});
    }
};

inline std::pair<StableIndexExpr, InteractionGraph> from_gates_grid(const Circuit& c) {
    StableIndexExpr e;
    InteractionGraph g;
    std::map<std::string, int> depth;
    std::map<std::string, int> row;
    for (std::size_t i = 0; i < c.inputs.size(); ++i) {
        row[c.inputs[i].name] = static_cast<int>(i);
        depth[c.inputs[i].name] = 0;
        g.vertices.insert({c.inputs[i].name, 0});
    }
    {
        std::vector<QubitId> ins = c.inputs;
        std::sort(ins.begin(), ins.end());
        for (const auto& q : ins) e.free_in.push_back({q.name, 0});
    }
    // depth of the last ZZ for each adjacent wire pair (lower row index key)
    std::map<int, int> last_zz_depth;

    auto emit_j = [&](const QubitId& q, Angle a) {
        int j = depth[q.name];
        Term t{};
        t.gate = TermGate::J;
        t.angle = a;
        t.deprecated = {{q.name, j}};
        t.advanced = {{q.name, j + 1}};
        e.terms.push_back(std::move(t));
        g.add_edge({q.name, j}, {q.name, j + 1});
        depth[q.name] = j + 1;
    };

    for (const CircuitGate& gate : c.gates) {
        if (gate.kind == CircuitGateKind::J) {
            if (!depth.count(gate.a.name)) throw Error("UnknownGate", "undeclared qubit " + gate.a.name);
            emit_j(gate.a, gate.angle);
        } else if (gate.kind == CircuitGateKind::ZZ) {
            QubitId v = gate.a, w = gate.b;
            if (!row.count(v.name) || !row.count(w.name))
                throw Error("UnknownGate", "undeclared qubit");
            if (row[w.name] < row[v.name]) std::swap(v, w);
            if (row[w.name] - row[v.name] != 1)
                throw Error("NotNearestNeighbor",
                            "ZZ on non-adjacent wires " + v.name + "," + w.name);
            int pair_key = row[v.name];
            // two-qubit gates on the same pair need two columns of separation
            if (depth[v.name] == depth[w.name]) {
                auto it = last_zz_depth.find(pair_key);
                if (it != last_zz_depth.end() && it->second == depth[v.name] - 1) {
                    emit_j(v, Angle(0));
                    emit_j(v, Angle(0));
                    emit_j(w, Angle(0));
                    emit_j(w, Angle(0));
                }
            }
            // equalize depths: identity pads of even length, plus at most one
            // triple of J(pi/2) when the parity disagrees
            while (depth[v.name] != depth[w.name]) {
                const QubitId& shorter = depth[v.name] < depth[w.name] ? v : w;
                int diff = std::abs(depth[v.name] - depth[w.name]);
                if (diff >= 2) {
                    emit_j(shorter, Angle(0));
                    emit_j(shorter, Angle(0));
                } else {
                    emit_j(shorter, Angle(2));
                    emit_j(shorter, Angle(2));
                    emit_j(shorter, Angle(2));
                }
            }
            int j = depth[v.name];
            Term t{};
            t.gate = TermGate::ZZ;
            t.stable = {{v.name, j}, {w.name, j}};
            e.terms.push_back(std::move(t));
            g.add_edge({v.name, j}, {w.name, j});
            last_zz_depth[pair_key] = j;
        } else {
            throw Error("UnknownGate", "grid construction accepts only J and ZZ");
        }
    }
    for (const auto& [q, j] : depth) e.free_out.push_back({q, j});
    return {std::move(e), std::move(g)};
}

// -------- structure of expressions --------

struct SuccessorFn {
    std::map<IndexId, IndexId> map;

    std::optional<IndexId> operator()(const IndexId& v) const {
        auto it = map.find(v);
        if (it == map.end()) return std::nullopt;
        return it->second;
    }
};

inline SuccessorFn successor_fn(const StableIndexExpr& e) {
    SuccessorFn f;
    for (const Term& t : e.terms) {
        if (t.deprecated.size() == 1 && t.advanced.size() == 1 &&
            t.deprecated[0].qubit == t.advanced[0].qubit) {
            f.map[t.deprecated[0]] = t.advanced[0];
        }
    }
    return f;
}

inline InteractionGraph interaction_graph(const StableIndexExpr& e) {
    InteractionGraph g;
    for (const auto& i : e.free_in) g.vertices.insert(i);
    for (const Term& t : e.terms) {
        for (const auto& i : t.stable) g.vertices.insert(i);
        for (const auto& i : t.deprecated) g.vertices.insert(i);
        for (const auto& i : t.advanced) g.vertices.insert(i);
        if ((t.gate == TermGate::H || t.gate == TermGate::J) && t.deprecated.size() == 1 &&
            t.advanced.size() == 1) {
            g.add_edge(t.deprecated[0], t.advanced[0]);
        }
        if ((t.gate == TermGate::CZ || t.gate == TermGate::ZZ) && t.stable.size() == 2) {
            g.add_edge(t.stable[0], t.stable[1]);
        }
    }
    return g;
}

namespace detail {

// Precedence arcs between term positions: a term precedes every later use
// of an index it advances, and every deprecation of an index it reads.
inline std::vector<std::set<std::size_t>> term_links(const StableIndexExpr& e) {
    const std::size_t n = e.terms.size();
    std::vector<std::set<std::size_t>> succ(n);
    std::map<IndexId, std::size_t> advanced_by;
    std::map<IndexId, std::vector<std::size_t>> readers; // stable or deprecated uses
    for (std::size_t i = 0; i < n; ++i) {
        const Term& t = e.terms[i];
        for (const auto& x : t.advanced) advanced_by[x] = i;
        for (const auto& x : t.stable) readers[x].push_back(i);
        for (const auto& x : t.deprecated) readers[x].push_back(i);
    }
    auto link = [&](std::size_t a, std::size_t b) {
        if (a != b) succ[a].insert(b);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Term& t = e.terms[i];
        for (const auto& x : t.stable) {
            auto it = advanced_by.find(x);
            if (it != advanced_by.end()) link(it->second, i);
        }
        for (const auto& x : t.deprecated) {
            auto it = advanced_by.find(x);
            if (it != advanced_by.end()) link(it->second, i);
            for (std::size_t r : readers[x]) {
                if (r != i) {
                    // a stable read of x must precede the deprecation of x
                    const Term& rt = e.terms[r];
                    bool stable_read = std::find(rt.stable.begin(), rt.stable.end(), x) !=
                                       rt.stable.end();
                    if (stable_read) link(r, i);
                }
            }
        }
    }
    return succ;
}

} // namespace detail

// A deterministic linear extension of the term pre-order.
inline std::vector<std::size_t> pattern_order_indices(const StableIndexExpr& e) {
    const std::size_t n = e.terms.size();
    std::vector<std::set<std::size_t>> succ = detail::term_links(e);
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s : succ[i]) ++indeg[s];
    auto term_key = [&](std::size_t i) {
        const Term& t = e.terms[i];
        IndexId best;
        bool first = true;
        for (const auto* lst : {&t.stable, &t.deprecated, &t.advanced}) {
            for (const auto& x : *lst) {
                if (first || x < best) {
                    best = x;
                    first = false;
                }
            }
        }
        return std::make_tuple(best, static_cast<int>(t.gate), i);
    };
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    std::vector<std::size_t> out;
    while (!ready.empty()) {
        auto it = std::min_element(ready.begin(), ready.end(),
                                   [&](std::size_t a, std::size_t b) {
                                       return term_key(a) < term_key(b);
                                   });
        std::size_t i = *it;
        ready.erase(it);
        out.push_back(i);
        for (std::size_t s : succ[i]) {
            if (--indeg[s] == 0) ready.push_back(s);
        }
    }
    if (out.size() != n) throw Error("CyclicExpression", "term pre-order has a cycle");
    return out;
}

inline std::vector<Term> to_pattern_order(const StableIndexExpr& e) {
    std::vector<Term> out;
    for (std::size_t i : pattern_order_indices(e)) out.push_back(e.terms[i]);
    return out;
}

// Longest chain in the term pre-order (0 for an empty expression).
inline std::size_t expr_depth(const StableIndexExpr& e) {
    std::vector<std::set<std::size_t>> succ = detail::term_links(e);
    std::vector<std::size_t> order = pattern_order_indices(e);
    std::vector<std::size_t> len(e.terms.size(), 1);
    std::size_t best = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (std::size_t s : succ[*it]) len[*it] = std::max(len[*it], len[s] + 1);
        best = std::max(best, len[*it]);
    }
    return best;
}

// -------- isomorphism --------

struct Isomorphism {
    std::map<IndexId, IndexId> lambda;       // index relabelling e1 -> e2
    std::vector<std::size_t> tau;            // term i of e1 -> term tau[i] of e2
};

namespace detail {

struct IsoState {
    const StableIndexExpr* e1;
    const StableIndexExpr* e2;
    std::map<IndexId, IndexId> lambda;
    std::map<IndexId, IndexId> lambda_inv;
    std::vector<long> tau;       // -1 = unmatched
    std::vector<bool> used2;

    bool bind(const IndexId& a, const IndexId& b, std::vector<std::pair<IndexId, IndexId>>& log) {
        auto it = lambda.find(a);
        if (it != lambda.end()) return it->second == b;
        auto jt = lambda_inv.find(b);
        if (jt != lambda_inv.end()) return false;
        lambda[a] = b;
        lambda_inv[b] = a;
        log.push_back({a, b});
        return true;
    }
    void unbind(const std::vector<std::pair<IndexId, IndexId>>& log) {
        for (auto it = log.rbegin(); it != log.rend(); ++it) {
            lambda.erase(it->first);
            lambda_inv.erase(it->second);
        }
    }
};

inline bool iso_match_terms(IsoState& st, std::size_t i1, std::size_t i2,
                            std::vector<std::pair<IndexId, IndexId>>& log) {
    const Term& a = st.e1->terms[i1];
    const Term& b = st.e2->terms[i2];
    if (!a.same_gate(b)) return false;
    if (a.deprecated.size() != b.deprecated.size() || a.advanced.size() != b.advanced.size())
        return false;
    for (std::size_t k = 0; k < a.deprecated.size(); ++k)
        if (!st.bind(a.deprecated[k], b.deprecated[k], log)) return false;
    for (std::size_t k = 0; k < a.advanced.size(); ++k)
        if (!st.bind(a.advanced[k], b.advanced[k], log)) return false;
    if (!a.symmetric_stable()) {
        for (std::size_t k = 0; k < a.stable.size(); ++k)
            if (!st.bind(a.stable[k], b.stable[k], log)) return false;
        return true;
    }
    // symmetric gates: match stable sets in any order (sizes are <= small d)
    std::vector<IndexId> bs = b.stable;
    // try to bind a.stable as a permutation of bs via backtracking
    std::vector<bool> taken(bs.size(), false);
    std::function<bool(std::size_t)> place = [&](std::size_t k) -> bool {
        if (k == a.stable.size()) return true;
        for (std::size_t j = 0; j < bs.size(); ++j) {
            if (taken[j]) continue;
            std::vector<std::pair<IndexId, IndexId>> sublog;
            if (st.bind(a.stable[k], bs[j], sublog)) {
                taken[j] = true;
                if (place(k + 1)) {
                    for (auto& p : sublog) log.push_back(p);
                    return true;
                }
                taken[j] = false;
            }
            st.unbind(sublog);
        }
        return false;
    };
    return place(0);
}

inline bool iso_search(IsoState& st) {
    // pick the unmatched e1 term with the most lambda-decided indices
    long best = -1;
    int best_score = -1;
    const std::size_t n = st.e1->terms.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (st.tau[i] >= 0) continue;
        int score = 0;
        const Term& t = st.e1->terms[i];
        for (const auto* lst : {&t.stable, &t.deprecated, &t.advanced})
            for (const auto& x : *lst)
                if (st.lambda.count(x)) ++score;
        if (score > best_score) {
            best_score = score;
            best = static_cast<long>(i);
        }
    }
    if (best < 0) return true;
    std::size_t i1 = static_cast<std::size_t>(best);
    for (std::size_t i2 = 0; i2 < n; ++i2) {
        if (st.used2[i2]) continue;
        std::vector<std::pair<IndexId, IndexId>> log;
        if (iso_match_terms(st, i1, i2, log)) {
            st.tau[i1] = static_cast<long>(i2);
            st.used2[i2] = true;
            if (iso_search(st)) return true;
            st.used2[i2] = false;
            st.tau[i1] = -1;
        }
        st.unbind(log);
    }
    return false;
}

} // namespace detail

inline std::optional<Isomorphism> isomorphic(const StableIndexExpr& e1,
                                             const StableIndexExpr& e2) {
    if (e1.terms.size() != e2.terms.size()) return std::nullopt;
    if (e1.free_in.size() != e2.free_in.size()) return std::nullopt;
    if (e1.free_out.size() != e2.free_out.size()) return std::nullopt;
    detail::IsoState st;
    st.e1 = &e1;
    st.e2 = &e2;
    st.tau.assign(e1.terms.size(), -1);
    st.used2.assign(e2.terms.size(), false);
    // seed from the free-input correspondence (both lists index-sorted)
    std::vector<IndexId> in1 = e1.free_in, in2 = e2.free_in;
    std::sort(in1.begin(), in1.end());
    std::sort(in2.begin(), in2.end());
    std::vector<std::pair<IndexId, IndexId>> seed_log;
    for (std::size_t k = 0; k < in1.size(); ++k) {
        if (!st.bind(in1[k], in2[k], seed_log)) return std::nullopt;
    }
    if (!detail::iso_search(st)) return std::nullopt;
    // the free outputs must correspond under lambda
    std::set<IndexId> out2(e2.free_out.begin(), e2.free_out.end());
    for (const auto& x : e1.free_out) {
        auto it = st.lambda.find(x);
        if (it == st.lambda.end() || !out2.count(it->second)) return std::nullopt;
    }
    Isomorphism iso;
    iso.lambda = st.lambda;
    for (long t : st.tau) iso.tau.push_back(static_cast<std::size_t>(t));
    return iso;
}

} // namespace mcal

#endif
