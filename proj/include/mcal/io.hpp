#ifndef MCAL_IO_HPP
#define MCAL_IO_HPP

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flow.hpp"
#include "pattern.hpp"
#include "sim.hpp"
#include "stable_index.hpp"

namespace mcal {

using Json = nlohmann::json;

// ---------------------------------------------------------------- text: shared

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

inline Error syntax_error(std::size_t lineno, const std::string& what) {
    return Error("SyntaxError", "line " + std::to_string(lineno) + ": " + what);
}

inline int parse_int(const std::string& s, std::size_t lineno) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw syntax_error(lineno, "expected an integer, got '" + s + "'");
    }
}

inline SignalExpr parse_signal(const std::string& s, std::size_t lineno) {
    SignalExpr out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) throw syntax_error(lineno, "empty term in signal '" + s + "'");
        out.toggle(QubitId(cur));
        cur.clear();
    };
    for (char c : s) {
        if (c == '+')
            flush();
        else
            cur += c;
    }
    flush();
    return out;
}

inline std::string signal_str(const SignalExpr& s) {
    std::string out;
    for (const auto& q : s.terms) {
        if (!out.empty()) out += '+';
        out += q.name;
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------- pattern text
//
// One command per line, executed top to bottom:
//   input v1 v2 ...          (optional header)
//   N v | E v w | M v XY t [s: a+b] | M v YZ t [s: a+b] | X v a+b | Z v a+b | S v a+b
// t is the angle in eighths (theta = t*pi/4); '#' starts a comment.

inline Pattern parse_pattern(const std::string& text) {
    Pattern p;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> t = detail::tokenize(line);
        if (t.empty()) continue;
        const std::string& op = t[0];
        if (op == "input") {
            for (std::size_t i = 1; i < t.size(); ++i) p.input_qubits.insert(QubitId(t[i]));
        } else if (op == "N") {
            if (t.size() != 2) throw detail::syntax_error(lineno, "N takes one qubit");
            p.commands.push_back(Command::prepare(QubitId(t[1])));
        } else if (op == "E") {
            if (t.size() != 3) throw detail::syntax_error(lineno, "E takes two qubits");
            p.commands.push_back(Command::entangle(QubitId(t[1]), QubitId(t[2])));
        } else if (op == "M") {
            if (t.size() != 4 && t.size() != 6)
                throw detail::syntax_error(lineno, "M takes qubit, plane, angle [s: deps]");
            Plane plane;
            if (t[2] == "XY")
                plane = Plane::XY;
            else if (t[2] == "YZ")
                plane = Plane::YZ;
            else
                throw detail::syntax_error(lineno, "unknown plane '" + t[2] + "'");
            Angle a(detail::parse_int(t[3], lineno));
            SignalExpr s;
            if (t.size() == 6) {
                if (t[4] != "s:") throw detail::syntax_error(lineno, "expected 's:'");
                s = detail::parse_signal(t[5], lineno);
            }
            p.commands.push_back(Command::measure(QubitId(t[1]), a, s, plane));
        } else if (op == "X" || op == "Z" || op == "S") {
            if (t.size() != 3) throw detail::syntax_error(lineno, op + " takes qubit and signal");
            SignalExpr s = detail::parse_signal(t[2], lineno);
            QubitId q(t[1]);
            if (op == "X")
                p.commands.push_back(Command::correct_x(q, s));
            else if (op == "Z")
                p.commands.push_back(Command::correct_z(q, s));
            else
                p.commands.push_back(Command::shift(q, s));
        } else {
            throw detail::syntax_error(lineno, "unknown command '" + op + "'");
        }
    }
    return p;
}

inline std::string print_pattern(const Pattern& p) {
    std::string out;
    if (!p.input_qubits.empty()) {
        out += "input";
        for (const auto& q : p.input_qubits) out += " " + q.name;
        out += "\n";
    }
    for (const Command& c : p.commands) {
        switch (c.kind) {
        case CommandKind::Prepare:
            out += "N " + c.qubit.name;
            break;
        case CommandKind::Entangle:
            out += "E " + c.qubit.name + " " + c.other.name;
            break;
        case CommandKind::Measure:
            out += "M " + c.qubit.name + (c.plane == Plane::XY ? " XY " : " YZ ") +
                   std::to_string(c.angle.eighths);
            if (!c.signal.empty()) out += " s: " + detail::signal_str(c.signal);
            break;
        case CommandKind::CorrectX:
            out += "X " + c.qubit.name + " " + detail::signal_str(c.signal);
            break;
        case CommandKind::CorrectZ:
            out += "Z " + c.qubit.name + " " + detail::signal_str(c.signal);
            break;
        case CommandKind::Shift:
            out += "S " + c.qubit.name + " " + detail::signal_str(c.signal);
            break;
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------- circuit text
//
//   in a b ...
//   H a | T a | Tdg a | CZ a b | ZZ a b | J t a | KET+ a
// Printing a wire-named expression additionally emits `ZZZ t a b c ...`
// lines for the multi-qubit phase gates of extracted circuits; parse_circuit
// does not accept those (they never appear in compiler input).

inline Circuit parse_circuit(const std::string& text) {
    Circuit c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> t = detail::tokenize(line);
        if (t.empty()) continue;
        const std::string& op = t[0];
        auto need = [&](std::size_t n) {
            if (t.size() != n)
                throw detail::syntax_error(lineno, "wrong operand count for '" + op + "'");
        };
        if (op == "in") {
            for (std::size_t i = 1; i < t.size(); ++i) c.inputs.push_back(QubitId(t[i]));
        } else if (op == "H") {
            need(2);
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::H, QubitId(t[1])));
        } else if (op == "T") {
            need(2);
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::T, QubitId(t[1])));
        } else if (op == "Tdg") {
            need(2);
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::Tdg, QubitId(t[1])));
        } else if (op == "CZ") {
            need(3);
            c.gates.push_back(CircuitGate::g2(CircuitGateKind::CZ, QubitId(t[1]), QubitId(t[2])));
        } else if (op == "ZZ") {
            need(3);
            c.gates.push_back(CircuitGate::g2(CircuitGateKind::ZZ, QubitId(t[1]), QubitId(t[2])));
        } else if (op == "J") {
            need(3);
            c.gates.push_back(
                CircuitGate::j(Angle(detail::parse_int(t[1], lineno)), QubitId(t[2])));
        } else if (op == "KET+") {
            need(2);
            c.gates.push_back(CircuitGate::g1(CircuitGateKind::KetPlus, QubitId(t[1])));
        } else {
            throw detail::syntax_error(lineno, "unknown gate '" + op + "'");
        }
    }
    return c;
}

inline std::string print_circuit(const Circuit& c) {
    std::string out;
    if (!c.inputs.empty()) {
        out += "in";
        for (const auto& q : c.inputs) out += " " + q.name;
        out += "\n";
    }
    for (const CircuitGate& g : c.gates) {
        switch (g.kind) {
        case CircuitGateKind::H: out += "H " + g.a.name; break;
        case CircuitGateKind::T: out += "T " + g.a.name; break;
        case CircuitGateKind::Tdg: out += "Tdg " + g.a.name; break;
        case CircuitGateKind::CZ: out += "CZ " + g.a.name + " " + g.b.name; break;
        case CircuitGateKind::ZZ: out += "ZZ " + g.a.name + " " + g.b.name; break;
        case CircuitGateKind::J:
            out += "J " + std::to_string(g.angle.eighths) + " " + g.a.name;
            break;
        case CircuitGateKind::KetPlus: out += "KET+ " + g.a.name; break;
        }
        out += "\n";
    }
    return out;
}

// Print a wire-named expression (one where every deprecation/advancement
// chain keeps a single qubit name, as produced by from_gates_free and
// remove_idops) as circuit text, in deterministic execution order.
inline std::string print_expr_as_circuit(const StableIndexExpr& e) {
    std::string out;
    std::vector<IndexId> ins = e.free_in;
    std::sort(ins.begin(), ins.end());
    if (!ins.empty()) {
        out += "in";
        for (const auto& i : ins) out += " " + i.qubit;
        out += "\n";
    }
    for (const Term& t : to_pattern_order(e)) {
        switch (t.gate) {
        case TermGate::H:
            out += "H " + t.deprecated[0].qubit;
            break;
        case TermGate::J:
            out += "J " + std::to_string(t.angle.eighths) + " " + t.deprecated[0].qubit;
            break;
        case TermGate::Tpow:
            out += (t.tpow >= 0 ? "T " : "Tdg ") + t.stable[0].qubit;
            break;
        case TermGate::CZ:
            out += "CZ " + t.stable[0].qubit + " " + t.stable[1].qubit;
            break;
        case TermGate::ZZ:
            out += "ZZ " + t.stable[0].qubit + " " + t.stable[1].qubit;
            break;
        case TermGate::ZZZ: {
            out += "ZZZ " + std::to_string(t.angle.eighths);
            for (const auto& i : t.stable) out += " " + i.qubit;
            break;
        }
        case TermGate::KetPlus:
            out += "KET+ " + t.advanced[0].qubit;
            break;
        case TermGate::ProjPlusHalfPi:
            out += "PROJ+i " + t.deprecated[0].qubit;
            break;
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------- JSON exports

inline Json signal_to_json(const SignalExpr& s) {
    Json a = Json::array();
    for (const auto& q : s.terms) a.push_back(q.name);
    return a;
}

inline Json pattern_to_json(const Pattern& p) {
    Json j;
    j["inputs"] = Json::array();
    for (const auto& q : p.input_qubits) j["inputs"].push_back(q.name);
    j["commands"] = Json::array();
    for (const Command& c : p.commands) {
        Json cj;
        switch (c.kind) {
        case CommandKind::Prepare:
            cj = {{"op", "N"}, {"qubit", c.qubit.name}};
            break;
        case CommandKind::Entangle:
            cj = {{"op", "E"}, {"qubit", c.qubit.name}, {"other", c.other.name}};
            break;
        case CommandKind::Measure:
            cj = {{"op", "M"},
                  {"qubit", c.qubit.name},
                  {"plane", c.plane == Plane::XY ? "XY" : "YZ"},
                  {"eighths", c.angle.eighths},
                  {"sign", signal_to_json(c.signal)}};
            break;
        case CommandKind::CorrectX:
            cj = {{"op", "X"}, {"qubit", c.qubit.name}, {"dep", signal_to_json(c.signal)}};
            break;
        case CommandKind::CorrectZ:
            cj = {{"op", "Z"}, {"qubit", c.qubit.name}, {"dep", signal_to_json(c.signal)}};
            break;
        case CommandKind::Shift:
            cj = {{"op", "S"}, {"qubit", c.qubit.name}, {"dep", signal_to_json(c.signal)}};
            break;
        }
        j["commands"].push_back(std::move(cj));
    }
    return j;
}

inline Json geometry_to_json(const Geometry& g,
                             const std::map<QubitId, MeasurementInfo>& angles) {
    Json j;
    j["vertices"] = Json::array();
    for (const auto& v : g.vertices) j["vertices"].push_back(v.name);
    j["edges"] = Json::array();
    for (const auto& e : g.edges) j["edges"].push_back({e.first.name, e.second.name});
    j["inputs"] = Json::array();
    for (const auto& v : g.inputs) j["inputs"].push_back(v.name);
    j["outputs"] = Json::array();
    for (const auto& v : g.outputs) j["outputs"].push_back(v.name);
    j["angles"] = Json::object();
    for (const auto& [q, mi] : angles) {
        j["angles"][q.name] = {{"plane", mi.plane == Plane::XY ? "XY" : "YZ"},
                               {"eighths", mi.angle.eighths}};
    }
    return j;
}

inline Json expr_to_json(const StableIndexExpr& e) {
    static const char* names[] = {"H", "Tpow", "J", "CZ", "ZZ", "ZZZ", "KET+", "PROJ+i"};
    auto ixs = [](const std::vector<IndexId>& v) {
        Json a = Json::array();
        for (const auto& i : v) a.push_back({{"qubit", i.qubit}, {"generation", i.generation}});
        return a;
    };
    Json j;
    j["terms"] = Json::array();
    for (const Term& t : e.terms) {
        Json tj;
        tj["gate"] = names[static_cast<int>(t.gate)];
        if (t.gate == TermGate::Tpow) tj["tpow"] = t.tpow;
        if (t.gate == TermGate::J || t.gate == TermGate::ZZZ) tj["eighths"] = t.angle.eighths;
        tj["stable"] = ixs(t.stable);
        tj["deprecated"] = ixs(t.deprecated);
        tj["advanced"] = ixs(t.advanced);
        j["terms"].push_back(std::move(tj));
    }
    j["free_in"] = ixs(e.free_in);
    j["free_out"] = ixs(e.free_out);
    return j;
}

inline Json decomp_to_json(const StarDecomp& d) {
    Json j;
    j["f"] = Json::object();
    for (const auto& [v, w] : d.f) j["f"][v.name] = w.name;
    j["L"] = Json::array();
    for (const auto& v : d.L) j["L"].push_back(v.name);
    j["layers"] = Json::object();
    for (const auto& [v, k] : d.layer) j["layers"][v.name] = k;
    return j;
}

inline std::map<QubitId, QubitId> successor_from_json(const Json& j) {
    std::map<QubitId, QubitId> f;
    const Json& fj = j.contains("f") ? j.at("f") : j;
    for (auto it = fj.begin(); it != fj.end(); ++it)
        f[QubitId(it.key())] = QubitId(it.value().get<std::string>());
    return f;
}

inline Json complex_to_json(const Cplx& z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (long r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (long c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json branchmap_to_json(const BranchMap& bm) {
    Json j;
    j["measured"] = Json::array();
    for (const auto& q : bm.measured) j["measured"].push_back(q.name);
    j["in_register"] = Json::array();
    for (const auto& q : bm.in_register) j["in_register"].push_back(q.name);
    j["out_register"] = Json::array();
    for (const auto& q : bm.out_register) j["out_register"].push_back(q.name);
    j["branches"] = Json::array();
    for (const Branch& b : bm.branches) {
        j["branches"].push_back({{"outcomes", b.outcomes}, {"kraus", matrix_to_json(b.k)}});
    }
    return j;
}

} // namespace mcal

#endif
