#ifndef MCAL_REWRITE_HPP
#define MCAL_REWRITE_HPP

#include <map>
#include <string>
#include <vector>

#include "pattern.hpp"

namespace mcal {

// Audit log of rule applications. Purely informational; the rewrite result
// does not depend on it.
struct RewriteTrace {
    struct Step {
        std::string rule;
        QubitId qubit;
    };
    std::vector<Step> steps;

    void note(std::string rule, const QubitId& q) {
        steps.push_back({std::move(rule), q});
    }
};

namespace detail {

inline int section_rank(const Command& c) {
    switch (c.kind) {
    case CommandKind::Prepare: return 0;
    case CommandKind::Entangle: return 1;
    case CommandKind::Measure:
    case CommandKind::Shift: return 2;
    case CommandKind::CorrectX:
    case CommandKind::CorrectZ: return 3;
    }
    return 3;
}

} // namespace detail

// preparations, then entanglers, then measurements (with interleaved shifts),
// then corrections
inline bool is_standard_form(const Pattern& p) {
    int rank = 0;
    for (const Command& c : p.commands) {
        int r = detail::section_rank(c);
        if (r < rank) return false;
        rank = r;
    }
    return true;
}

// standard form with no shifts and no signs on Pauli-angle XY measurements
inline bool is_normal_form(const Pattern& p) {
    if (!is_standard_form(p)) return false;
    for (const Command& c : p.commands) {
        if (c.kind == CommandKind::Shift) return false;
        if (c.kind == CommandKind::Measure && c.plane == Plane::XY &&
            (c.angle.is_pauli_x() || c.angle.is_pauli_y()) && !c.signal.empty())
            return false;
    }
    return true;
}

// Push every correction to the end and every entangler to the front, in one
// scan. Pending corrections are tracked per qubit; commuting X through an
// entangler spawns a Z on the partner, commuting X through a measurement
// flips the angle sign, commuting Z through a measurement leaves a shift.
// For YZ-plane measurements the roles of X and Z swap.
inline Pattern standardize(const Pattern& p, RewriteTrace* trace = nullptr) {
    std::map<QubitId, SignalExpr> acc_x, acc_z;
    std::set<QubitId> preps;
    std::map<std::pair<QubitId, QubitId>, int> edge_parity;
    std::vector<Command> middle; // measurements and shifts, original order

    auto shift_compensate = [&](const QubitId& v, const SignalExpr& beta) {
        // a postponed dependency that mentions s[v] was recorded before this
        // shift, so the pre-shift value is s[v] + beta from here on
        for (auto* acc : {&acc_x, &acc_z}) {
            for (auto& [q, dep] : *acc) {
                if (dep.mentions(v)) dep ^= beta;
            }
        }
    };

    for (const Command& c : p.commands) {
        switch (c.kind) {
        case CommandKind::Prepare:
            preps.insert(c.qubit);
            break;
        case CommandKind::Entangle: {
            const SignalExpr xv = acc_x[c.qubit];
            const SignalExpr xw = acc_x[c.other];
            if (!xv.empty()) {
                acc_z[c.other] ^= xv;
                if (trace) trace->note("EX", c.qubit);
            }
            if (!xw.empty()) {
                acc_z[c.qubit] ^= xw;
                if (trace) trace->note("EX", c.other);
            }
            edge_parity[{c.qubit, c.other}] ^= 1;
            break;
        }
        case CommandKind::Measure: {
            Command m = c;
            SignalExpr to_sign = c.plane == Plane::XY ? acc_x[c.qubit] : acc_z[c.qubit];
            SignalExpr to_shift = c.plane == Plane::XY ? acc_z[c.qubit] : acc_x[c.qubit];
            if (!to_sign.empty()) {
                m.signal ^= to_sign;
                if (trace) trace->note("MX", c.qubit);
            }
            middle.push_back(std::move(m));
            if (!to_shift.empty()) {
                middle.push_back(Command::shift(c.qubit, to_shift));
                if (trace) trace->note("MZ", c.qubit);
            }
            acc_x.erase(c.qubit);
            acc_z.erase(c.qubit);
            break;
        }
        case CommandKind::CorrectX:
            acc_x[c.qubit] ^= c.signal;
            break;
        case CommandKind::CorrectZ:
            acc_z[c.qubit] ^= c.signal;
            break;
        case CommandKind::Shift:
            shift_compensate(c.qubit, c.signal);
            middle.push_back(c);
            break;
        }
    }

    Pattern out;
    out.input_qubits = p.input_qubits;
    for (const auto& q : preps) out.commands.push_back(Command::prepare(q));
    for (const auto& [e, parity] : edge_parity) {
        if (parity) out.commands.push_back(Command::entangle(e.first, e.second));
    }
    for (auto& c : middle) out.commands.push_back(std::move(c));
    for (auto& [q, dep] : acc_x) {
        if (!dep.empty()) out.commands.push_back(Command::correct_x(q, dep));
    }
    for (auto& [q, dep] : acc_z) {
        if (!dep.empty()) out.commands.push_back(Command::correct_z(q, dep));
    }
    return out;
}

// Pauli measurements ignore or defer their sign: an XY measurement at angle
// 0 or pi is sign-blind, and one at +-pi/2 turns its sign into a shift.
inline Pattern pauli_simplify(const Pattern& p, RewriteTrace* trace = nullptr) {
    Pattern out;
    out.input_qubits = p.input_qubits;
    for (const Command& c : p.commands) {
        if (c.kind == CommandKind::Measure && c.plane == Plane::XY && !c.signal.empty()) {
            if (c.angle.is_pauli_x()) {
                out.commands.push_back(Command::measure(c.qubit, c.angle, {}, c.plane));
                if (trace) trace->note("pauli-x", c.qubit);
                continue;
            }
            if (c.angle.is_pauli_y()) {
                out.commands.push_back(Command::measure(c.qubit, c.angle, {}, c.plane));
                out.commands.push_back(Command::shift(c.qubit, c.signal));
                if (trace) trace->note("pauli-y", c.qubit);
                continue;
            }
        }
        out.commands.push_back(c);
    }
    return out;
}

// Eliminate shifts by substituting s[v] -> s[v] + beta in every later
// dependency. Trailing shifts have no observer and are dropped.
inline Pattern signal_shift(const Pattern& p, RewriteTrace* trace = nullptr) {
    std::map<QubitId, SignalExpr> subst;
    auto apply = [&](const SignalExpr& s) {
        SignalExpr out;
        for (const auto& q : s.terms) {
            out.toggle(q);
            auto it = subst.find(q);
            if (it != subst.end()) out ^= it->second;
        }
        return out;
    };
    Pattern out;
    out.input_qubits = p.input_qubits;
    for (const Command& c : p.commands) {
        if (c.kind == CommandKind::Shift) {
            subst[c.qubit] ^= apply(c.signal);
            if (trace) trace->note("shift-subst", c.qubit);
            continue;
        }
        Command cc = c;
        cc.signal = apply(c.signal);
        out.commands.push_back(std::move(cc));
    }
    return out;
}

inline Pattern normalize(const Pattern& p, RewriteTrace* trace = nullptr) {
    return signal_shift(pauli_simplify(standardize(p, trace), trace), trace);
}

} // namespace mcal

#endif
