// Shared random generators for the test suite.
#ifndef MCAL_TEST_UTIL_HPP
#define MCAL_TEST_UTIL_HPP

#include <array>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <mcal/pattern.hpp>
#include <mcal/stable_index.hpp>

namespace mcal_test {

struct CircuitOptions {
    int max_wires = 3;
    int max_gates = 7;
    bool redundancy_free = false; // never repeat a cZ on the same wire segments
    bool lnn = false;             // cZ only between adjacent wires
};

// Random circuit over {H, T, Tdg, CZ}. With redundancy_free, a cZ is skipped
// when both wire segments already carry one (cZ is an involution, so a
// doubled cZ cancels and the round trip would legitimately return a smaller
// circuit).
inline mcal::Circuit random_circuit(std::mt19937& rng, const CircuitOptions& opt = {}) {
    using namespace mcal;
    int n = 1 + (int)(rng() % opt.max_wires);
    Circuit c;
    for (int i = 0; i < n; ++i) c.inputs.push_back(QubitId("q" + std::to_string(i)));
    int ng = 1 + (int)(rng() % opt.max_gates);
    std::vector<int> gen(n, 0);
    std::set<std::array<int, 4>> used_pairs;
    for (int g = 0; g < ng; ++g) {
        int k = rng() % (n >= 2 ? 4 : 3);
        int a = rng() % n;
        switch (k) {
        case 0:
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::H, c.inputs[a]));
            ++gen[a];
            break;
        case 1:
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::T, c.inputs[a]));
            break;
        case 2:
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::Tdg, c.inputs[a]));
            break;
        default: {
            int b;
            if (opt.lnn) {
                b = a == 0 ? 1 : (a == n - 1 ? n - 2 : a + 1 - 2 * (int)(rng() % 2));
            } else {
                b = (a + 1 + (int)(rng() % (n - 1))) % n;
            }
            if (opt.redundancy_free) {
                int lo = std::min(a, b), hi = std::max(a, b);
                std::array<int, 4> key{lo, gen[lo], hi, gen[hi]};
                if (used_pairs.count(key)) continue;
                used_pairs.insert(key);
            }
            c.gates.push_back(CircuitGate::g2(CircuitGateKind::CZ, c.inputs[a], c.inputs[b]));
            break;
        }
        }
    }
    return c;
}

// Random command soup over 2..5 qubits; the caller filters for
// well-formedness. Exercises prepare/entangle/measure (both planes),
// corrections with random sign expressions, and shifts.
inline mcal::Pattern random_pattern(std::mt19937& rng) {
    using namespace mcal;
    std::uniform_int_distribution<int> dn(2, 5);
    int n = dn(rng);
    std::vector<QubitId> qs;
    for (int i = 0; i < n; ++i) qs.push_back(QubitId("q" + std::to_string(i)));
    Pattern p;
    std::set<QubitId> live, measured;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < n; ++i) {
        if (coin(rng)) {
            p.input_qubits.insert(qs[i]);
            live.insert(qs[i]);
        }
    }
    auto rand_sig = [&]() {
        SignalExpr s;
        for (const auto& q : measured)
            if (coin(rng)) s.toggle(q);
        return s;
    };
    std::uniform_int_distribution<int> dop(0, 6), dang(-3, 4);
    int steps = 14 + (int)(rng() % 10);
    for (int s = 0; s < steps; ++s) {
        std::vector<QubitId> lv(live.begin(), live.end());
        switch (dop(rng)) {
        case 0: {
            std::vector<QubitId> fresh;
            for (const auto& q : qs)
                if (!live.count(q) && !measured.count(q) && !p.input_qubits.count(q))
                    fresh.push_back(q);
            if (fresh.empty()) break;
            QubitId q = fresh[rng() % fresh.size()];
            p.commands.push_back(Command::prepare(q));
            live.insert(q);
            break;
        }
        case 1: {
            if (lv.size() < 2) break;
            int a = rng() % lv.size(), b = rng() % lv.size();
            if (a == b) break;
            p.commands.push_back(Command::entangle(lv[a], lv[b]));
            break;
        }
        case 2:
        case 3: {
            if (lv.empty()) break;
            QubitId q = lv[rng() % lv.size()];
            Plane pl = (rng() % 4 == 0) ? Plane::YZ : Plane::XY;
            p.commands.push_back(Command::measure(q, Angle(dang(rng)), rand_sig(), pl));
            live.erase(q);
            measured.insert(q);
            break;
        }
        case 4:
            if (lv.empty()) break;
            p.commands.push_back(Command::correct_x(lv[rng() % lv.size()], rand_sig()));
            break;
        case 5:
            if (lv.empty()) break;
            p.commands.push_back(Command::correct_z(lv[rng() % lv.size()], rand_sig()));
            break;
        case 6: {
            if (measured.empty()) break;
            std::vector<QubitId> ms(measured.begin(), measured.end());
            p.commands.push_back(Command::shift(ms[rng() % ms.size()], rand_sig()));
            break;
        }
        }
    }
    return p;
}

// Random geometry with independent input/output/mediator marks; mediators
// (both-root-and-center candidates) are restricted to measured qubits.
inline std::pair<mcal::Geometry, std::set<mcal::QubitId>>
random_geometry(std::mt19937& rng, int n, int edge_percent = 45) {
    using namespace mcal;
    Geometry g;
    std::vector<QubitId> vs;
    for (int i = 0; i < n; ++i) {
        vs.push_back(QubitId("v" + std::to_string(i)));
        g.vertices.insert(vs[i]);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((int)(rng() % 100) < edge_percent) g.edges.insert(Geometry::edge(vs[i], vs[j]));
    std::set<QubitId> M;
    for (const auto& v : vs) {
        if (rng() % 4 == 0) g.inputs.insert(v);
        if (rng() % 4 == 0) g.outputs.insert(v);
        if (rng() % 4 == 0 && !g.outputs.count(v)) M.insert(v);
    }
    return {g, M};
}

} // namespace mcal_test

#endif
