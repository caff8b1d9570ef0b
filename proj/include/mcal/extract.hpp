#ifndef MCAL_EXTRACT_HPP
#define MCAL_EXTRACT_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "deps.hpp"
#include "flow.hpp"
#include "pattern.hpp"
#include "rewrite.hpp"
#include "stable_index.hpp"

namespace mcal {

// Candidate circuit for a star decomposition, over {H, T, cZ} plus a
// d-qubit Z-phase for YZ-measured mediators. The vertices of G serve
// directly as the stable indices of the output expression.
inline StableIndexExpr build_circuit(const Geometry& g,
                                     const std::map<QubitId, QubitId>& f,
                                     const std::vector<QubitId>& L,
                                     const std::map<QubitId, int>& t,
                                     const std::map<QubitId, MeasurementInfo>& angles) {
    StableIndexExpr c;
    auto ix = [](const QubitId& q) { return IndexId{q.name, 0}; };
    auto emit_t_units = [&](const QubitId& q, int power) {
        for (int j = 0; j < (power < 0 ? -power : power); ++j) {
            Term tm{};
            tm.gate = TermGate::Tpow;
            tm.tpow = power < 0 ? -1 : 1;
            tm.stable = {ix(q)};
            c.terms.push_back(std::move(tm));
        }
    };
    // Each star owns the edges incident to its center in the residual
    // graph left by the stars later in circuit order; walking L backwards
    // and deleting centers recovers those residuals, so no edge is
    // represented by two stars.
    std::map<QubitId, std::set<QubitId>> adj;
    for (const auto& e : g.edges) {
        adj[e.first].insert(e.second);
        adj[e.second].insert(e.first);
    }
    std::map<QubitId, std::vector<QubitId>> star_n;
    for (auto it2 = L.rbegin(); it2 != L.rend(); ++it2) {
        const QubitId& u = *it2;
        const QubitId& center = f.at(u);
        std::vector<QubitId>& n = star_n[u];
        n.assign(adj[center].begin(), adj[center].end());
        for (const auto& w : adj[center]) adj[w].erase(center);
        adj.erase(center);
    }
    for (const QubitId& u : L) {
        const QubitId& fu = f.at(u);
        if (fu == u) {
            std::vector<QubitId> n = star_n.at(u);
            auto it = angles.find(u);
            if (it != angles.end() && it->second.plane == Plane::YZ) {
                Term tm{};
                tm.gate = TermGate::ZZZ;
                tm.angle = it->second.angle;
                for (const auto& w : n) tm.stable.push_back(ix(w));
                c.terms.push_back(std::move(tm));
            } else {
                // Zzz_d is (T^2 x ... x T^2) times pairwise cZ, up to phase
                for (std::size_t i = 0; i < n.size(); ++i) {
                    for (std::size_t j = i + 1; j < n.size(); ++j) {
                        Term tm{};
                        tm.gate = TermGate::CZ;
                        tm.stable = {ix(n[i]), ix(n[j])};
                        c.terms.push_back(std::move(tm));
                    }
                    emit_t_units(n[i], 2);
                }
            }
        } else {
            const QubitId& v = fu;
            auto fv = f.find(v);
            for (const auto& w : star_n.at(u)) {
                if (w == u) continue;
                if (fv != f.end() && w == fv->second) continue;
                Term tm{};
                tm.gate = TermGate::CZ;
                tm.stable = {ix(v), ix(w)};
                c.terms.push_back(std::move(tm));
            }
            Term h{};
            h.gate = TermGate::H;
            h.deprecated = {ix(u)};
            h.advanced = {ix(v)};
            c.terms.push_back(std::move(h));
            emit_t_units(u, t.at(u));
        }
    }
    std::set<QubitId> image;
    for (const auto& [v, fv] : f) image.insert(fv);
    std::set<QubitId> itilde;
    for (const auto& v : g.vertices)
        if (!image.count(v)) itilde.insert(v);
    for (const auto& u : itilde) {
        for (const auto& w : g.neighbors(u)) {
            if (itilde.count(w) && u < w) {
                Term tm{};
                tm.gate = TermGate::CZ;
                tm.stable = {ix(u), ix(w)};
                c.terms.push_back(std::move(tm));
            }
        }
        if (!g.inputs.count(u)) {
            Term tm{};
            tm.gate = TermGate::KetPlus;
            tm.advanced = {ix(u)};
            c.terms.push_back(std::move(tm));
        }
    }
    for (const auto& q : g.inputs) c.free_in.push_back(ix(q));
    for (const auto& q : g.outputs) c.free_out.push_back(ix(q));
    return c;
}

namespace detail {

// single-qubit op buffered between two-qubit gates: H, or a run of T
struct OneQubitOp {
    bool is_h;
    int tpow; // nonzero when !is_h, canonical in {-3..4}
};

struct WireBuf {
    std::string name;
    int out_gen = 0;
    std::vector<OneQubitOp> ops; // execution order
};

inline void push_reduced(std::vector<OneQubitOp>& ops, OneQubitOp op) {
    ops.push_back(op);
    for (;;) {
        std::size_t n = ops.size();
        if (n >= 2 && !ops[n - 1].is_h && !ops[n - 2].is_h) {
            int merged = Angle::canonical(ops[n - 1].tpow + ops[n - 2].tpow);
            ops.pop_back();
            ops.pop_back();
            if (merged != 0) ops.push_back({false, merged});
            continue;
        }
        if (n >= 2 && ops[n - 1].is_h && ops[n - 2].is_h) {
            ops.pop_back();
            ops.pop_back();
            continue;
        }
        // (H T^2)^3 is the identity up to phase: execution-order suffix
        // T^2, H, T^2, H, T^2, H
        if (n >= 6 && ops[n - 1].is_h && !ops[n - 2].is_h && ops[n - 2].tpow == 2 &&
            ops[n - 3].is_h && !ops[n - 4].is_h && ops[n - 4].tpow == 2 &&
            ops[n - 5].is_h && !ops[n - 6].is_h && ops[n - 6].tpow == 2) {
            ops.resize(n - 6);
            continue;
        }
        break;
    }
}

} // namespace detail

// Cancel trivial products of single-qubit gates: adjacent powers of T
// merge mod 8, H H drops, and (H T^2)^3 drops. Buffers accumulate between
// the two-qubit gates of each wire and flush in execution order.
inline StableIndexExpr remove_idops(const StableIndexExpr& e) {
    std::vector<Term> ordered = to_pattern_order(e);
    StableIndexExpr out;
    std::map<IndexId, std::size_t> slot_of; // current index -> wire slot
    std::vector<detail::WireBuf> wires;

    auto new_wire = [&](const IndexId& start) {
        slot_of[start] = wires.size();
        wires.push_back(detail::WireBuf{start.qubit, 0, {}});
        return wires.size() - 1;
    };
    for (const auto& i : e.free_in) {
        new_wire(i);
        out.free_in.push_back({i.qubit, 0});
    }
    auto cur_ix = [&](std::size_t slot) {
        return IndexId{wires[slot].name, wires[slot].out_gen};
    };
    auto flush = [&](std::size_t slot) {
        for (const auto& op : wires[slot].ops) {
            if (op.is_h) {
                Term h{};
                h.gate = TermGate::H;
                h.deprecated = {cur_ix(slot)};
                ++wires[slot].out_gen;
                h.advanced = {cur_ix(slot)};
                out.terms.push_back(std::move(h));
            } else {
                int p = op.tpow;
                for (int j = 0; j < (p < 0 ? -p : p); ++j) {
                    Term tm{};
                    tm.gate = TermGate::Tpow;
                    tm.tpow = p < 0 ? -1 : 1;
                    tm.stable = {cur_ix(slot)};
                    out.terms.push_back(std::move(tm));
                }
            }
        }
        wires[slot].ops.clear();
    };
    auto slot_for = [&](const IndexId& i) {
        auto it = slot_of.find(i);
        if (it == slot_of.end())
            throw Error("CyclicExpression", "index " + i.str() + " is not current");
        return it->second;
    };
    for (const Term& t : ordered) {
        switch (t.gate) {
        case TermGate::H: {
            std::size_t s = slot_for(t.deprecated[0]);
            slot_of.erase(t.deprecated[0]);
            slot_of[t.advanced[0]] = s;
            detail::push_reduced(wires[s].ops, {true, 0});
            break;
        }
        case TermGate::J: {
            std::size_t s = slot_for(t.deprecated[0]);
            slot_of.erase(t.deprecated[0]);
            slot_of[t.advanced[0]] = s;
            if (t.angle.eighths != 0)
                detail::push_reduced(wires[s].ops, {false, t.angle.eighths});
            detail::push_reduced(wires[s].ops, {true, 0});
            break;
        }
        case TermGate::Tpow: {
            std::size_t s = slot_for(t.stable[0]);
            int p = Angle::canonical(t.tpow);
            if (p != 0) detail::push_reduced(wires[s].ops, {false, p});
            break;
        }
        case TermGate::CZ:
        case TermGate::ZZ:
        case TermGate::ZZZ: {
            Term tm{};
            tm.gate = t.gate;
            tm.angle = t.angle;
            for (const auto& i : t.stable) {
                std::size_t s = slot_for(i);
                flush(s);
                tm.stable.push_back(cur_ix(s));
            }
            out.terms.push_back(std::move(tm));
            break;
        }
        case TermGate::KetPlus: {
            std::size_t s = new_wire(t.advanced[0]);
            Term tm{};
            tm.gate = TermGate::KetPlus;
            tm.advanced = {cur_ix(s)};
            out.terms.push_back(std::move(tm));
            break;
        }
        case TermGate::ProjPlusHalfPi: {
            std::size_t s = slot_for(t.deprecated[0]);
            flush(s);
            Term tm{};
            tm.gate = TermGate::ProjPlusHalfPi;
            tm.deprecated = {cur_ix(s)};
            out.terms.push_back(std::move(tm));
            slot_of.erase(t.deprecated[0]);
            wires[s].out_gen = -1; // wire closed
            break;
        }
        }
    }
    for (auto& [ix, s] : slot_of) {
        flush(s);
        out.free_out.push_back(cur_ix(s));
    }
    std::sort(out.free_out.begin(), out.free_out.end());
    return out;
}

struct SemanticResult {
    std::optional<StableIndexExpr> circuit;
    std::string reason; // diagnostic when no circuit is produced
    std::map<QubitId, QubitId> f;
    std::vector<QubitId> L;

    bool ok() const { return circuit.has_value(); }
};

// From a normalized procedure to a candidate circuit, or a refusal: check
// the edge bound, find the (unique) star decomposition, verify the
// dependencies against it, then build and tidy the circuit.
inline SemanticResult semantic(const Pattern& p) {
    SemanticResult res;
    if (!validate_pattern(p).ok()) {
        res.reason = "NotWellFormed";
        return res;
    }
    if (!is_normal_form(p)) {
        res.reason = "NotNormalized";
        return res;
    }
    auto [g, angles] = geometry_of(p);
    if (g.inputs.size() != g.outputs.size()) {
        res.reason = "UnbalancedIO";
        return res;
    }
    std::map<QubitId, int> t;
    std::set<QubitId> m_xy, m_med;
    for (const auto& [q, mi] : angles) {
        if (mi.plane == Plane::XY) {
            m_xy.insert(q);
            t[q] = Angle::canonical(-mi.angle.eighths);
            if (mi.angle.eighths == 2) m_med.insert(q);
        } else {
            m_med.insert(q); // YZ qubits must be both root and center
            t[q] = mi.angle.eighths;
        }
    }
    if (!edge_bound_ok(g.vertices.size(), g.outputs.size(), g.edges.size())) {
        res.reason = "EdgeBound";
        return res;
    }
    auto d = find_extended_star_decomp(g, m_xy, m_med);
    if (!d) {
        res.reason = "NoFlow";
        return res;
    }
    res.f = d->f;
    res.L = d->L;
    auto check = test_dependencies(p, d->f);
    if (!check.ok) {
        res.reason = "DependencyMismatch";
        for (const auto& s : check.failures) res.reason += "; " + s;
        return res;
    }
    res.circuit = remove_idops(build_circuit(g, d->f, d->L, t, angles));
    return res;
}

} // namespace mcal

#endif
