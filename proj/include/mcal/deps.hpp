#ifndef MCAL_DEPS_HPP
#define MCAL_DEPS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gf2.hpp"
#include "pattern.hpp"

namespace mcal {

// F records which measurement carries a sign dependency after
// normalization; T is the digraph of shift operators.
//   F[v][w] = 1  iff  w = f(v) != v and w is not measured at a Pauli angle
//   T[v][w] = 1  iff  w != v and either w ~ f(v), or w = f(v) with a +-pi/2
//                     default angle
// Pauli angles count only for XY-plane measurements.
struct DependencyMatrices {
    std::vector<QubitId> verts; // index <-> vertex, sorted
    std::map<QubitId, std::size_t> pos;
    Gf2Matrix F, T;

    Gf2Vec indicator(const SignalExpr& s) const {
        Gf2Vec d(verts.size());
        for (const auto& q : s.terms) {
            auto it = pos.find(q);
            if (it != pos.end()) d.set(it->second, true);
        }
        return d;
    }
};

inline DependencyMatrices
dependency_matrices(const Geometry& g, const std::map<QubitId, MeasurementInfo>& angles,
                    const std::map<QubitId, QubitId>& f) {
    DependencyMatrices m;
    m.verts.assign(g.vertices.begin(), g.vertices.end());
    for (std::size_t i = 0; i < m.verts.size(); ++i) m.pos[m.verts[i]] = i;
    const std::size_t n = m.verts.size();
    m.F = Gf2Matrix(n);
    m.T = Gf2Matrix(n);
    auto in_ax = [&](const QubitId& q) {
        auto it = angles.find(q);
        return it != angles.end() && it->second.plane == Plane::XY &&
               it->second.angle.is_pauli_x();
    };
    auto in_ay = [&](const QubitId& q) {
        auto it = angles.find(q);
        return it != angles.end() && it->second.plane == Plane::XY &&
               it->second.angle.is_pauli_y();
    };
    for (const auto& [v, fv] : f) {
        std::size_t vi = m.pos.at(v);
        if (!(fv == v) && !in_ax(fv) && !in_ay(fv)) m.F.set(vi, m.pos.at(fv), true);
        for (const auto& w : g.neighbors(fv)) {
            if (!(w == v)) m.T.set(vi, m.pos.at(w), true);
        }
        if (!(fv == v) && in_ay(fv)) m.T.set(vi, m.pos.at(fv), true);
    }
    return m;
}

struct DepCheckResult {
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string what) {
        ok = false;
        failures.push_back(std::move(what));
    }
};

// Check every dependency of a normalized procedure against the matrices,
// without inverting (I - T): a dependency vector d is consistent with a
// predicted vector p when (I - T) d = p. Absent operations are checked as
// empty dependencies, so a deleted correction is caught rather than
// vacuously passing.
inline DepCheckResult test_dependencies(const Pattern& p,
                                        const std::map<QubitId, QubitId>& f) {
    auto [g, angles] = geometry_of(p);
    DependencyMatrices m = dependency_matrices(g, angles, f);
    DepCheckResult res;
    auto consistent = [&](const SignalExpr& s, const Gf2Vec& predicted) {
        Gf2Vec d = m.indicator(s);
        Gf2Vec lhs = d;
        lhs ^= m.T.mul(d);
        return lhs == predicted;
    };
    std::map<QubitId, SignalExpr> x_dep, z_dep;
    std::set<QubitId> seen_measure;
    for (const Command& c : p.commands) {
        switch (c.kind) {
        case CommandKind::Measure: {
            seen_measure.insert(c.qubit);
            if (!consistent(c.signal, m.F.col(m.pos.at(c.qubit))))
                res.fail("sign dependency of " + c.qubit.name);
            break;
        }
        case CommandKind::CorrectX:
        case CommandKind::CorrectZ:
            if (!g.outputs.count(c.qubit)) {
                res.fail("correction on measured qubit " + c.qubit.name);
                break;
            }
            (c.kind == CommandKind::CorrectX ? x_dep : z_dep)[c.qubit] ^= c.signal;
            break;
        case CommandKind::Shift:
            res.fail("shift operator present on " + c.qubit.name);
            break;
        default:
            break;
        }
    }
    for (const auto& v : g.vertices) {
        if (g.outputs.count(v)) {
            if (!consistent(x_dep[v], m.F.col(m.pos.at(v))))
                res.fail("X correction on " + v.name);
            if (!consistent(z_dep[v], m.T.col(m.pos.at(v))))
                res.fail("Z correction on " + v.name);
        } else if (!seen_measure.count(v)) {
            res.fail("no measurement of " + v.name);
        }
    }
    return res;
}

// The normal form the theorem predicts for a geometry with successor
// function f, with measurements in the supplied order.
inline Pattern predicted_normal_form(const Geometry& g,
                                     const std::map<QubitId, MeasurementInfo>& angles,
                                     const std::map<QubitId, QubitId>& f,
                                     const std::vector<QubitId>& measure_order) {
    DependencyMatrices m = dependency_matrices(g, angles, f);
    Gf2Matrix inv = neumann_inverse(m.T);
    Gf2Matrix sign = inv.mul(m.F);
    Gf2Matrix zdep = inv.mul(m.T);
    auto expr_of = [&](const Gf2Vec& d) {
        SignalExpr s;
        for (std::size_t i = 0; i < m.verts.size(); ++i)
            if (d.get(i)) s.toggle(m.verts[i]);
        return s;
    };
    Pattern p;
    p.input_qubits = g.inputs;
    for (const auto& v : g.vertices)
        if (!g.inputs.count(v)) p.commands.push_back(Command::prepare(v));
    for (const auto& e : g.edges)
        p.commands.push_back(Command::entangle(e.first, e.second));
    for (const auto& v : measure_order) {
        const MeasurementInfo& mi = angles.at(v);
        p.commands.push_back(
            Command::measure(v, mi.angle, expr_of(sign.col(m.pos.at(v))), mi.plane));
    }
    for (const auto& v : g.vertices) {
        if (!g.outputs.count(v)) continue;
        SignalExpr sx = expr_of(sign.col(m.pos.at(v)));
        if (!sx.empty()) p.commands.push_back(Command::correct_x(v, sx));
    }
    for (const auto& v : g.vertices) {
        if (!g.outputs.count(v)) continue;
        SignalExpr sz = expr_of(zdep.col(m.pos.at(v)));
        if (!sz.empty()) p.commands.push_back(Command::correct_z(v, sz));
    }
    return p;
}

} // namespace mcal

#endif
