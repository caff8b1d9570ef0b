#ifndef MCAL_PATTERN_HPP
#define MCAL_PATTERN_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "angle.hpp"
#include "qubit.hpp"

namespace mcal {

struct Error : std::runtime_error {
    std::string kind;
    Error(std::string k, const std::string& msg)
        : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

enum class CommandKind { Prepare, Entangle, Measure, CorrectX, CorrectZ, Shift };
enum class Plane { XY, YZ };

struct Command {
    CommandKind kind;
    QubitId qubit;        // primary operand
    QubitId other;        // second operand of Entangle
    Plane plane = Plane::XY;
    Angle angle;          // Measure only
    SignalExpr signal;    // Measure sign / correction dep / shift dep

    static Command prepare(QubitId v) {
        Command c{CommandKind::Prepare, std::move(v), {}, Plane::XY, {}, {}};
        return c;
    }
    static Command entangle(QubitId v, QubitId w) {
        if (w < v) std::swap(v, w);
        Command c{CommandKind::Entangle, std::move(v), std::move(w), Plane::XY, {}, {}};
        return c;
    }
    static Command measure(QubitId v, Angle a, SignalExpr s = {}, Plane p = Plane::XY) {
        Command c{CommandKind::Measure, std::move(v), {}, p, a, std::move(s)};
        return c;
    }
    static Command correct_x(QubitId v, SignalExpr s) {
        Command c{CommandKind::CorrectX, std::move(v), {}, Plane::XY, {}, std::move(s)};
        return c;
    }
    static Command correct_z(QubitId v, SignalExpr s) {
        Command c{CommandKind::CorrectZ, std::move(v), {}, Plane::XY, {}, std::move(s)};
        return c;
    }
    static Command shift(QubitId v, SignalExpr s) {
        Command c{CommandKind::Shift, std::move(v), {}, Plane::XY, {}, std::move(s)};
        return c;
    }

    bool operator==(const Command& o) const {
        return kind == o.kind && qubit == o.qubit && other == o.other && plane == o.plane &&
               angle == o.angle && signal == o.signal;
    }
};

// Commands are stored in execution order: the first command listed is the
// first one performed.
struct Pattern {
    std::vector<Command> commands;
    std::set<QubitId> input_qubits;

    bool operator==(const Pattern& o) const {
        return commands == o.commands && input_qubits == o.input_qubits;
    }
};

struct Violation {
    std::string kind;
    std::size_t index;
    QubitId qubit;
};

struct WellFormedReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline WellFormedReport validate_pattern(const Pattern& p) {
    WellFormedReport rep;
    std::set<QubitId> live = p.input_qubits;
    std::set<QubitId> prepared;
    std::set<QubitId> measured;
    std::set<QubitId> signal_used; // qubits mentioned by some SignalExpr so far
    auto bad = [&](const char* kind, std::size_t i, const QubitId& q) {
        rep.violations.push_back({kind, i, q});
    };
    for (std::size_t i = 0; i < p.commands.size(); ++i) {
        const Command& c = p.commands[i];
        auto require_live = [&](const QubitId& q) {
            if (measured.count(q)) {
                bad("UsedAfterMeasure", i, q);
            } else if (!live.count(q)) {
                bad("UsedBeforePrepare", i, q);
            }
        };
        auto check_signal = [&](const SignalExpr& s) {
            for (const auto& q : s.terms) {
                if (!measured.count(q)) bad("ForwardSignalReference", i, q);
                signal_used.insert(q);
            }
        };
        switch (c.kind) {
        case CommandKind::Prepare:
            if (prepared.count(c.qubit) || p.input_qubits.count(c.qubit)) {
                bad("DuplicatePrepare", i, c.qubit);
            } else if (measured.count(c.qubit)) {
                bad("UsedAfterMeasure", i, c.qubit);
            } else {
                prepared.insert(c.qubit);
                live.insert(c.qubit);
            }
            break;
        case CommandKind::Entangle:
            if (c.qubit == c.other) bad("SelfEntangle", i, c.qubit);
            require_live(c.qubit);
            require_live(c.other);
            break;
        case CommandKind::Measure:
            if (measured.count(c.qubit)) {
                bad("DuplicateMeasure", i, c.qubit);
                break;
            }
            require_live(c.qubit);
            check_signal(c.signal);
            measured.insert(c.qubit);
            break;
        case CommandKind::CorrectX:
        case CommandKind::CorrectZ:
            require_live(c.qubit);
            check_signal(c.signal);
            break;
        case CommandKind::Shift:
            if (!measured.count(c.qubit)) {
                bad("ForwardSignalReference", i, c.qubit);
            } else if (signal_used.count(c.qubit)) {
                // a shift must precede every use of its qubit's outcome
                bad("LateShift", i, c.qubit);
            }
            check_signal(c.signal);
            break;
        }
    }
    return rep;
}

struct Geometry {
    std::set<QubitId> vertices;
    std::set<std::pair<QubitId, QubitId>> edges; // stored with first < second
    std::set<QubitId> inputs;
    std::set<QubitId> outputs;

    static std::pair<QubitId, QubitId> edge(QubitId a, QubitId b) {
        if (b < a) std::swap(a, b);
        return {std::move(a), std::move(b)};
    }
    bool adjacent(const QubitId& a, const QubitId& b) const {
        return edges.count(edge(a, b)) != 0;
    }
    std::vector<QubitId> neighbors(const QubitId& v) const {
        std::vector<QubitId> out;
        for (const auto& e : edges) {
            if (e.first == v) out.push_back(e.second);
            else if (e.second == v) out.push_back(e.first);
        }
        return out;
    }
    bool operator==(const Geometry& o) const {
        return vertices == o.vertices && edges == o.edges && inputs == o.inputs &&
               outputs == o.outputs;
    }
};

struct MeasurementInfo {
    Plane plane = Plane::XY;
    Angle angle;
};

inline std::pair<Geometry, std::map<QubitId, MeasurementInfo>>
geometry_of(const Pattern& p) {
    Geometry g;
    g.inputs = p.input_qubits;
    g.vertices = p.input_qubits;
    std::map<QubitId, MeasurementInfo> angles;
    std::set<QubitId> measured;
    for (const Command& c : p.commands) {
        g.vertices.insert(c.qubit);
        switch (c.kind) {
        case CommandKind::Entangle: {
            g.vertices.insert(c.other);
            auto e = Geometry::edge(c.qubit, c.other);
            auto it = g.edges.find(e);
            if (it != g.edges.end())
                g.edges.erase(it); // cZ is self-inverse, even multiplicity drops out
            else
                g.edges.insert(e);
            break;
        }
        case CommandKind::Measure:
            measured.insert(c.qubit);
            angles[c.qubit] = MeasurementInfo{c.plane, c.angle};
            break;
        default:
            break;
        }
    }
    for (const auto& v : g.vertices) {
        if (!measured.count(v)) g.outputs.insert(v);
    }
    return {g, angles};
}

// g2 after g1. Shared vertices must lie in the composition interface.
inline Geometry compose_geometry(const Geometry& g2, const Geometry& g1) {
    for (const auto& v : g2.vertices) {
        if (g1.vertices.count(v) && !(g2.inputs.count(v) && g1.outputs.count(v))) {
            throw Error("NotComposable", "shared qubit " + v.name + " not in I2 and O1");
        }
    }
    Geometry g;
    g.vertices = g1.vertices;
    g.vertices.insert(g2.vertices.begin(), g2.vertices.end());
    g.edges = g1.edges;
    for (const auto& e : g2.edges) {
        auto it = g.edges.find(e);
        if (it != g.edges.end())
            g.edges.erase(it);
        else
            g.edges.insert(e);
    }
    g.inputs = g1.inputs;
    for (const auto& v : g2.inputs) {
        if (!g1.outputs.count(v)) g.inputs.insert(v);
    }
    g.outputs = g2.outputs;
    for (const auto& v : g1.outputs) {
        if (!g2.inputs.count(v)) g.outputs.insert(v);
    }
    return g;
}

// p2 after p1, relabelling p2's non-input qubits away from p1's namespace.
inline Pattern compose_pattern(const Pattern& p2, const Pattern& p1) {
    auto [g1, a1] = geometry_of(p1);
    auto [g2, a2] = geometry_of(p2);
    (void)a1;
    (void)a2;
    for (const auto& v : g2.inputs) {
        if (g1.vertices.count(v) && !g1.outputs.count(v)) {
            throw Error("NotComposable", "input " + v.name + " of p2 collides with p1");
        }
    }
    std::set<std::string> taken;
    for (const auto& v : g1.vertices) taken.insert(v.name);
    for (const auto& v : g2.vertices) taken.insert(v.name);
    std::map<QubitId, QubitId> rename;
    for (const auto& v : g2.vertices) {
        if (g2.inputs.count(v)) continue;
        if (!g1.vertices.count(v)) continue;
        int k = 1;
        std::string fresh;
        do {
            fresh = v.name + "_c" + std::to_string(k++);
        } while (taken.count(fresh));
        taken.insert(fresh);
        rename[v] = QubitId(fresh);
    }
    auto map_q = [&](const QubitId& q) {
        auto it = rename.find(q);
        return it == rename.end() ? q : it->second;
    };
    Pattern out;
    out.input_qubits = p1.input_qubits;
    for (const auto& v : g2.inputs) {
        if (!g1.outputs.count(v)) out.input_qubits.insert(v);
    }
    out.commands = p1.commands;
    for (Command c : p2.commands) {
        c.qubit = map_q(c.qubit);
        if (c.kind == CommandKind::Entangle) {
            c.other = map_q(c.other);
            if (c.other < c.qubit) std::swap(c.qubit, c.other);
        }
        SignalExpr s;
        for (const auto& q : c.signal.terms) s.terms.insert(map_q(q));
        c.signal = std::move(s);
        out.commands.push_back(std::move(c));
    }
    return out;
}

} // namespace mcal

#endif
