#ifndef MCAL_CONSTRUCT_HPP
#define MCAL_CONSTRUCT_HPP

#include <map>
#include <string>
#include <vector>

#include "pattern.hpp"
#include "rewrite.hpp"
#include "stable_index.hpp"

namespace mcal {

enum class Method { DKP, RBB };

// Lower {H,T,Tdg,CZ,J,ZZ,KET+} onto the two-gate alphabet of the chosen
// construction: {J, CZ} or {J, ZZ}. T powers are diagonal, so they commute
// through the entangling gates and are buffered per wire until the next J
// absorbs them; Zz = (T^2 x T^2) cZ up to phase, so the cZ substitution just
// debits two T from each buffer.
inline Circuit to_j_form(const Circuit& c, bool use_zz) {
    Circuit out;
    out.inputs = c.inputs;
    std::map<std::string, int> pending; // deferred T exponent per wire
    std::vector<std::string> wire_order;
    auto touch = [&](const QubitId& q) {
        if (!pending.count(q.name)) {
            pending[q.name] = 0;
            wire_order.push_back(q.name);
        }
    };
    for (const auto& q : c.inputs) touch(q);
    for (const CircuitGate& g : c.gates) {
        switch (g.kind) {
        case CircuitGateKind::H:
            touch(g.a);
            out.gates.push_back(CircuitGate::j(Angle(pending[g.a.name]), g.a));
            pending[g.a.name] = 0;
            break;
        case CircuitGateKind::J:
            touch(g.a);
            out.gates.push_back(
                CircuitGate::j(Angle(g.angle.eighths + pending[g.a.name]), g.a));
            pending[g.a.name] = 0;
            break;
        case CircuitGateKind::T:
            touch(g.a);
            ++pending[g.a.name];
            break;
        case CircuitGateKind::Tdg:
            touch(g.a);
            --pending[g.a.name];
            break;
        case CircuitGateKind::CZ:
            touch(g.a);
            touch(g.b);
            if (use_zz) {
                out.gates.push_back(CircuitGate::g2(CircuitGateKind::ZZ, g.a, g.b));
                pending[g.a.name] -= 2;
                pending[g.b.name] -= 2;
            } else {
                out.gates.push_back(g);
            }
            break;
        case CircuitGateKind::ZZ:
            touch(g.a);
            touch(g.b);
            out.gates.push_back(g);
            break;
        case CircuitGateKind::KetPlus:
            touch(g.a);
            out.gates.push_back(g);
            break;
        }
    }
    // a leftover T^m needs two J: T^m = J(0) J(m pi/4)
    for (const auto& w : wire_order) {
        int m = Angle::canonical(pending[w]);
        if (m != 0) {
            out.gates.push_back(CircuitGate::j(Angle(m), QubitId(w)));
            out.gates.push_back(CircuitGate::j(Angle(0), QubitId(w)));
        }
    }
    return out;
}

inline Circuit circuit_normal_form(const Circuit& c) { return to_j_form(c, true); }

// Expand back onto {H,T,Tdg,CZ}: J(m pi/4) = H T^m and Zz = (T^2 x T^2) cZ
// up to phase.
inline Circuit expand_to_htcz(const Circuit& c) {
    Circuit out;
    out.inputs = c.inputs;
    auto emit_t = [&](const QubitId& q, int m) {
        CircuitGateKind k = m > 0 ? CircuitGateKind::T : CircuitGateKind::Tdg;
        for (int i = 0; i < (m > 0 ? m : -m); ++i)
            out.gates.push_back(CircuitGate::g1(k, q));
    };
    for (const CircuitGate& g : c.gates) {
        switch (g.kind) {
        case CircuitGateKind::J:
            emit_t(g.a, g.angle.eighths);
            out.gates.push_back(CircuitGate::g1(CircuitGateKind::H, g.a));
            break;
        case CircuitGateKind::ZZ:
            out.gates.push_back(CircuitGate::g2(CircuitGateKind::CZ, g.a, g.b));
            emit_t(g.a, 2);
            emit_t(g.b, 2);
            break;
        default:
            out.gates.push_back(g);
        }
    }
    return out;
}

// The pattern assembly homomorphism. Each wire q runs through qubits
// q, q.1, q.2, ...; mediators are named after the pair they couple.
//   J(theta) on q:   X_q' ^ s[q] . M_q ^ -theta . E_{q q'} . N_q'
//   cZ on q, r:      E_{q r}
//   Zz on q, r:      Z_q^s[a] Z_r^s[a] . M_a^{pi/2} . E_{a q} . E_{a r} . N_a
inline Pattern phi(const Circuit& c) {
    Pattern p;
    std::map<std::string, int> gen;
    auto cur = [&](const QubitId& q) {
        auto it = gen.find(q.name);
        if (it == gen.end()) throw Error("UsedBeforePrepare", "qubit " + q.name);
        return it->second == 0 ? QubitId(q.name)
                               : QubitId(q.name + "." + std::to_string(it->second));
    };
    for (const auto& q : c.inputs) {
        gen[q.name] = 0;
        p.input_qubits.insert(q);
    }
    int mediators = 0;
    for (const CircuitGate& g : c.gates) {
        switch (g.kind) {
        case CircuitGateKind::J: {
            QubitId v = cur(g.a);
            ++gen[g.a.name];
            QubitId w = cur(g.a);
            p.commands.push_back(Command::prepare(w));
            p.commands.push_back(Command::entangle(v, w));
            p.commands.push_back(Command::measure(v, -g.angle));
            p.commands.push_back(Command::correct_x(w, SignalExpr{v}));
            break;
        }
        case CircuitGateKind::CZ:
            p.commands.push_back(Command::entangle(cur(g.a), cur(g.b)));
            break;
        case CircuitGateKind::ZZ: {
            QubitId v = cur(g.a), w = cur(g.b);
            QubitId a(v.name + "." + w.name + ".m" + std::to_string(mediators++));
            p.commands.push_back(Command::prepare(a));
            p.commands.push_back(Command::entangle(a, v));
            p.commands.push_back(Command::entangle(a, w));
            p.commands.push_back(Command::measure(a, Angle(2)));
            p.commands.push_back(Command::correct_z(v, SignalExpr{a}));
            p.commands.push_back(Command::correct_z(w, SignalExpr{a}));
            break;
        }
        case CircuitGateKind::KetPlus:
            if (gen.count(g.a.name)) throw Error("DuplicatePrepare", "qubit " + g.a.name);
            gen[g.a.name] = 0;
            p.commands.push_back(Command::prepare(QubitId(g.a.name)));
            break;
        default:
            throw Error("UnknownGate", "pattern assembly accepts only J, CZ, ZZ, KET+");
        }
    }
    return p;
}

// Raw assembly output, before any rewriting.
inline Pattern construct_raw(const Circuit& c, Method m) {
    return phi(to_j_form(c, m == Method::RBB));
}

// Full pipeline; with to_normal=false the result is only standardized.
inline Pattern construct(const Circuit& c, Method m, bool to_normal = true) {
    Pattern p = construct_raw(c, m);
    return to_normal ? normalize(p) : standardize(p);
}

} // namespace mcal

#endif
