// Command-line front end for the measurement-pattern toolkit.
//
// Exit codes: 0 success / accepted, 2 rejected (no flow, inconsistent
// dependencies, failed round trip), 1 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <mcal/construct.hpp>
#include <mcal/deps.hpp>
#include <mcal/extract.hpp>
#include <mcal/flow.hpp>
#include <mcal/io.hpp>
#include <mcal/rewrite.hpp>
#include <mcal/sim.hpp>

namespace {

struct Config {
    unsigned long seed = 0;
    bool json = false;
    double tol = 1e-9;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        // fall back to the fixture directory, if one is configured
        const char* dir = std::getenv("MCAL_FIXTURES");
        if (dir) {
            std::ifstream fx(std::string(dir) + "/" + path);
            if (fx) {
                std::ostringstream ss;
                ss << fx.rdbuf();
                return ss.str();
            }
        }
        throw mcal::Error("FileError", "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw mcal::Error("FileError", "cannot write " + path);
    out << content;
}

// Canonical rejection tokens for the semantic map. Exceeding the edge bound
// proves the absence of a star decomposition, so it reports as no-flow with
// the precise check in the detail field.
std::pair<std::string, std::string> reason_token(const std::string& reason) {
    std::string head = reason.substr(0, reason.find(';'));
    if (head == "NoFlow") return {"no-flow", "no star decomposition"};
    if (head == "EdgeBound") return {"no-flow", "edge bound exceeded"};
    if (head == "NotWellFormed") return {"not-well-formed", reason};
    if (head == "NotNormalized") return {"not-normalized", reason};
    if (head == "UnbalancedIO") return {"unbalanced-io", reason};
    return {"inconsistent-dependencies", reason};
}

// The root/center candidate sets the semantic map uses: every XY-measured
// qubit may be a root, and +pi/2 XY or any YZ measurement may be both root
// and center.
void measured_sets(const std::map<mcal::QubitId, mcal::MeasurementInfo>& angles,
                   std::set<mcal::QubitId>& m_xy, std::set<mcal::QubitId>& m_med) {
    for (const auto& [q, mi] : angles) {
        if (mi.plane == mcal::Plane::XY) {
            m_xy.insert(q);
            if (mi.angle.eighths == 2) m_med.insert(q);
        } else {
            m_med.insert(q);
        }
    }
}

struct ExprStats {
    std::size_t qubits = 0;
    std::map<std::string, std::size_t> gates; // by printed mnemonic
    std::size_t depth = 0;
};

ExprStats expr_stats(const mcal::StableIndexExpr& e) {
    using mcal::TermGate;
    ExprStats s;
    s.qubits = e.free_in.size();
    for (const mcal::Term& t : e.terms) {
        switch (t.gate) {
        case TermGate::H: ++s.gates["H"]; break;
        case TermGate::J: ++s.gates["J"]; break;
        case TermGate::Tpow: ++s.gates[t.tpow >= 0 ? "T" : "Tdg"]; break;
        case TermGate::CZ: ++s.gates["CZ"]; break;
        case TermGate::ZZ: ++s.gates["ZZ"]; break;
        case TermGate::ZZZ: ++s.gates["ZZZ"]; break;
        case TermGate::KetPlus:
            ++s.qubits;
            ++s.gates["KET+"];
            break;
        case TermGate::ProjPlusHalfPi: ++s.gates["PROJ+i"]; break;
        }
    }
    s.depth = mcal::expr_depth(e);
    return s;
}

int cmd_compile(const Config&, const std::string& file, const std::string& mode,
                bool no_normalize, const std::string& out) {
    mcal::Circuit c = mcal::parse_circuit(read_file(file));
    mcal::Method m = mode == "rbb" ? mcal::Method::RBB : mcal::Method::DKP;
    mcal::Pattern p = mcal::construct(c, m, !no_normalize);
    write_output(out, mcal::print_pattern(p));
    return 0;
}

int cmd_rewrite(const Config& cfg, const std::string& file, const std::string& to,
                bool trace, const std::string& out) {
    mcal::Pattern p = mcal::parse_pattern(read_file(file));
    mcal::RewriteTrace tr;
    mcal::Pattern q = to == "standard" ? mcal::standardize(p, &tr) : mcal::normalize(p, &tr);
    write_output(out, mcal::print_pattern(q));
    if (trace) {
        mcal::Json steps = mcal::Json::array();
        for (const auto& st : tr.steps)
            steps.push_back({{"rule", st.rule}, {"qubit", st.qubit.name}});
        std::cerr << steps.dump(cfg.json ? -1 : 2) << "\n";
    }
    return 0;
}

int cmd_semantic(const Config& cfg, const std::string& file, const std::string& out) {
    mcal::Pattern p = mcal::parse_pattern(read_file(file));
    if (!mcal::is_normal_form(p)) {
        std::cerr << "note: input was not in normal form; normalizing first\n";
        p = mcal::normalize(p);
    }
    mcal::SemanticResult res = mcal::semantic(p);
    if (!res.ok()) {
        auto [token, detail] = reason_token(res.reason);
        std::cout << "rejected: " << token << " (" << detail << ")\n";
        return 2;
    }
    if (cfg.json)
        write_output(out, mcal::expr_to_json(*res.circuit).dump(2) + "\n");
    else
        write_output(out, mcal::print_expr_as_circuit(*res.circuit));
    return 0;
}

int cmd_check_flow(const Config& cfg, const std::string& file) {
    mcal::Pattern p = mcal::parse_pattern(read_file(file));
    auto [g, angles] = mcal::geometry_of(p);
    std::set<mcal::QubitId> m_xy, m_med;
    measured_sets(angles, m_xy, m_med);
    auto d = mcal::find_extended_star_decomp(g, m_xy, m_med);
    if (!d) {
        std::cout << "no-flow\n";
        return 2;
    }
    std::cout << mcal::decomp_to_json(*d).dump(cfg.json ? -1 : 2) << "\n";
    return 0;
}

int cmd_verify_deps(const Config&, const std::string& file, const std::string& flow_file) {
    mcal::Pattern p = mcal::parse_pattern(read_file(file));
    std::map<mcal::QubitId, mcal::QubitId> f;
    if (!flow_file.empty()) {
        f = mcal::successor_from_json(mcal::Json::parse(read_file(flow_file)));
    } else {
        auto [g, angles] = mcal::geometry_of(p);
        std::set<mcal::QubitId> m_xy, m_med;
        measured_sets(angles, m_xy, m_med);
        auto d = mcal::find_extended_star_decomp(g, m_xy, m_med);
        if (!d) {
            std::cout << "inconsistent: no-flow\n";
            return 2;
        }
        f = d->f;
    }
    mcal::DepCheckResult res = mcal::test_dependencies(p, f);
    if (res.ok) {
        std::cout << "consistent\n";
        return 0;
    }
    std::cout << "inconsistent: " << res.failures.front() << "\n";
    return 2;
}

int cmd_simulate(const Config& cfg, const std::string& file, bool as_unitary) {
    mcal::Pattern p = mcal::parse_pattern(read_file(file));
    if (as_unitary) {
        auto u = mcal::pattern_as_unitary(p, cfg.tol);
        if (!u) {
            std::cout << "not-unitary\n";
            return 2;
        }
        std::cout << mcal::Json({{"unitary", mcal::matrix_to_json(*u)}}).dump(cfg.json ? -1 : 2)
                  << "\n";
        return 0;
    }
    mcal::BranchMap bm = mcal::run_pattern(p);
    std::cout << mcal::branchmap_to_json(bm).dump(cfg.json ? -1 : 2) << "\n";
    return 0;
}

int cmd_roundtrip(const Config& cfg, const std::string& file, const std::string& mode) {
    using namespace mcal;
    Circuit c = parse_circuit(read_file(file));
    Method m = mode == "rbb" ? Method::RBB : Method::DKP;
    Pattern p = construct(c, m);
    SemanticResult res = semantic(p);
    if (!res.ok()) {
        auto [token, detail] = reason_token(res.reason);
        std::cout << "FAIL: semantic rejected: " << token << " (" << detail << ")\n";
        return 2;
    }
    StableIndexExpr ref = m == Method::DKP
                              ? remove_idops(from_gates_free(c))
                              : remove_idops(from_gates_free(expand_to_htcz(circuit_normal_form(c))));
    bool iso = isomorphic(*res.circuit, ref).has_value();
    bool unit = true;
    if (c.inputs.size() <= 10) {
        Mat uref = circuit_unitary(from_gates_free(c)).mat;
        Mat ucand = circuit_unitary(*res.circuit).mat;
        unit = equal_up_to_phase(ucand, uref, cfg.tol);
    }
    ExprStats in = expr_stats(ref), outs = expr_stats(*res.circuit);
    bool bounds = outs.qubits <= in.qubits && outs.depth <= in.depth;
    for (const auto& [k, v] : outs.gates)
        if (v > in.gates[k]) bounds = false;
    Json j = {{"isomorphic", iso},
              {"unitary_equal", unit},
              {"bounds_ok", bounds},
              {"input", {{"qubits", in.qubits}, {"depth", in.depth}, {"gates", in.gates}}},
              {"output", {{"qubits", outs.qubits}, {"depth", outs.depth}, {"gates", outs.gates}}}};
    std::cout << j.dump(cfg.json ? -1 : 2) << "\n";
    bool pass = iso && unit && bounds;
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"measurement-pattern compiler toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.add_option("--seed", cfg.seed, "random seed for reproducible runs");
    app.add_flag("--json", cfg.json, "compact machine-readable output");
    app.add_option("--tol", cfg.tol, "tolerance for unitary comparisons")
        ->check(CLI::PositiveNumber);

    std::string file, out, mode = "dkp", to = "normal", flow_file;
    bool no_normalize = false, trace = false, as_unitary = false;

    auto* compile = app.add_subcommand("compile", "circuit -> measurement pattern");
    compile->add_option("circuit", file, "circuit file")->required();
    compile->add_option("--mode", mode, "dkp or rbb")->check(CLI::IsMember({"dkp", "rbb"}));
    compile->add_flag("--no-normalize", no_normalize, "stop after standardization");
    compile->add_option("-o,--output", out, "output file (default stdout)");

    auto* rewrite = app.add_subcommand("rewrite", "rewrite a pattern to a canonical form");
    rewrite->add_option("pattern", file, "pattern file")->required();
    rewrite->add_option("--to", to, "standard or normal")
        ->check(CLI::IsMember({"standard", "normal"}));
    rewrite->add_flag("--trace", trace, "emit the rule application log to stderr");
    rewrite->add_option("-o,--output", out, "output file (default stdout)");

    auto* semantic = app.add_subcommand("semantic", "pattern -> candidate circuit");
    semantic->add_option("pattern", file, "pattern file")->required();
    semantic->add_option("-o,--output", out, "output file (default stdout)");

    auto* check_flow = app.add_subcommand("check-flow", "find a star decomposition");
    check_flow->add_option("pattern", file, "pattern file")->required();

    auto* verify = app.add_subcommand("verify-deps", "check dependency consistency");
    verify->add_option("pattern", file, "pattern file")->required();
    verify->add_option("--flow", flow_file, "successor function as JSON");

    auto* simulate = app.add_subcommand("simulate", "run a pattern branch by branch");
    simulate->add_option("pattern", file, "pattern file")->required();
    simulate->add_flag("--as-unitary", as_unitary, "recover the common unitary, if any");

    auto* roundtrip = app.add_subcommand("roundtrip", "compile, extract, and compare");
    roundtrip->add_option("circuit", file, "circuit file")->required();
    roundtrip->add_option("--mode", mode, "dkp or rbb")->check(CLI::IsMember({"dkp", "rbb"}));

    CLI11_PARSE(app, argc, argv);
    try {
        if (*compile) return cmd_compile(cfg, file, mode, no_normalize, out);
        if (*rewrite) return cmd_rewrite(cfg, file, to, trace, out);
        if (*semantic) return cmd_semantic(cfg, file, out);
        if (*check_flow) return cmd_check_flow(cfg, file);
        if (*verify) return cmd_verify_deps(cfg, file, flow_file);
        if (*simulate) return cmd_simulate(cfg, file, as_unitary);
        if (*roundtrip) return cmd_roundtrip(cfg, file, mode);
    } catch (const mcal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
