#ifndef MCAL_SIM_HPP
#define MCAL_SIM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "pattern.hpp"
#include "stable_index.hpp"

namespace mcal {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Gate coefficient conventions: T carries balanced phases e^{(2x-1) i pi/8},
// which makes J(m pi/4) = H T^m and Zz = e^{i pi/4} (T^2 x T^2) cZ hold as
// exact matrix identities rather than identities up to global phase.
inline Mat mat_h() {
    Mat m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}
inline Mat mat_tpow(int k) {
    constexpr double pi = 3.14159265358979323846264338327950288;
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::exp(Cplx(0, -k * pi / 8.0));
    m(1, 1) = std::exp(Cplx(0, k * pi / 8.0));
    return m;
}
inline Mat mat_j(const Angle& a) {
    const double th = a.radians();
    const double s = 1.0 / std::sqrt(2.0);
    Mat m(2, 2);
    m(0, 0) = s * std::exp(Cplx(0, -th / 2));
    m(0, 1) = s * std::exp(Cplx(0, th / 2));
    m(1, 0) = s * std::exp(Cplx(0, -th / 2));
    m(1, 1) = -s * std::exp(Cplx(0, th / 2));
    return m;
}
inline Mat mat_cz() {
    Mat m = Mat::Identity(4, 4);
    m(3, 3) = -1;
    return m;
}
// exp(-i theta Z^{(x)d} / 2) as a dense diagonal
inline Mat mat_zzz(int d, const Angle& theta) {
    const double th = theta.radians();
    const int dim = 1 << d;
    Mat m = Mat::Zero(dim, dim);
    for (int r = 0; r < dim; ++r) {
        int parity = __builtin_popcount(static_cast<unsigned>(r)) & 1;
        double sign = parity ? -1.0 : 1.0;
        m(r, r) = std::exp(Cplx(0, -sign * th / 2));
    }
    return m;
}
inline Mat mat_zz() { return mat_zzz(2, Angle(2)); }
inline Mat mat_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Mat mat_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

struct DenseOperator {
    Mat mat;                            // rows: out register, cols: in register
    std::vector<QubitId> row_register;  // entry 0 is the most significant bit
    std::vector<QubitId> col_register;
};

namespace detail {

// in-place single-qubit gate on bit position p of a (2^n x C) state matrix
inline void apply1(Mat& st, int n, int p, const Mat& g) {
    const long stride = 1L << (n - 1 - p);
    for (long base = 0; base < st.rows(); base += 2 * stride) {
        for (long r = base; r < base + stride; ++r) {
            Eigen::RowVectorXcd r0 = st.row(r);
            Eigen::RowVectorXcd r1 = st.row(r + stride);
            st.row(r) = g(0, 0) * r0 + g(0, 1) * r1;
            st.row(r + stride) = g(1, 0) * r0 + g(1, 1) * r1;
        }
    }
}

inline void apply_cz(Mat& st, int n, int p, int q) {
    const long bp = 1L << (n - 1 - p);
    const long bq = 1L << (n - 1 - q);
    for (long r = 0; r < st.rows(); ++r) {
        if ((r & bp) && (r & bq)) st.row(r) = -st.row(r);
    }
}

// diagonal phase on a set of bit positions: exp(-i sign(parity) theta / 2)
inline void apply_zzz(Mat& st, int n, const std::vector<int>& ps, const Angle& theta) {
    const double th = theta.radians();
    const Cplx ph0 = std::exp(Cplx(0, -th / 2));
    const Cplx ph1 = std::exp(Cplx(0, th / 2));
    for (long r = 0; r < st.rows(); ++r) {
        int parity = 0;
        for (int p : ps) parity ^= static_cast<int>((r >> (n - 1 - p)) & 1);
        st.row(r) *= parity ? ph1 : ph0;
    }
}

inline Mat insert_qubit(const Mat& st, int n, int p, const Cplx& a0, const Cplx& a1) {
    Mat out(st.rows() * 2, st.cols());
    const long low = 1L << (n - p); // bits below the inserted position (new layout)
    for (long r = 0; r < st.rows(); ++r) {
        const long hi = r >> (n - p);
        const long lo = r & (low - 1);
        const long base = (hi << (n - p + 1)) | lo;
        out.row(base) = a0 * st.row(r);
        out.row(base | low) = a1 * st.row(r);
    }
    return out;
}

inline Mat contract_qubit(const Mat& st, int n, int p, const Cplx& b0, const Cplx& b1) {
    Mat out(st.rows() / 2, st.cols());
    const long low = 1L << (n - 1 - p);
    for (long r = 0; r < out.rows(); ++r) {
        const long hi = r >> (n - 1 - p);
        const long lo = r & (low - 1);
        const long base = (hi << (n - p)) | lo;
        out.row(r) = b0 * st.row(base) + b1 * st.row(base | low);
    }
    return out;
}

} // namespace detail

// -------- circuits --------

inline Mat permute_qubit_rows(const Mat& m, const std::vector<int>& perm);

// Evaluate an expression as a dense operator. A wire is a chain of indices
// linked by deprecation/advancement (the names along a chain need not
// agree); the registers are sorted by the free index at each end.
inline DenseOperator circuit_unitary(const StableIndexExpr& e) {
    std::vector<Term> ordered = to_pattern_order(e);
    std::vector<IndexId> wires = e.free_in; // current index per wire slot
    std::sort(wires.begin(), wires.end());
    DenseOperator op;
    for (const auto& ix : wires) op.col_register.push_back(QubitId(ix.qubit));
    Mat st = Mat::Identity(1L << wires.size(), 1L << wires.size());
    auto pos_of = [&](const IndexId& ix) {
        auto it = std::find(wires.begin(), wires.end(), ix);
        if (it == wires.end())
            throw Error("CyclicExpression", "index " + ix.str() + " is not current");
        return static_cast<int>(it - wires.begin());
    };
    for (const Term& t : ordered) {
        const int n = static_cast<int>(wires.size());
        switch (t.gate) {
        case TermGate::H:
        case TermGate::J: {
            int p = pos_of(t.deprecated[0]);
            detail::apply1(st, n, p, t.gate == TermGate::H ? mat_h() : mat_j(t.angle));
            wires[p] = t.advanced[0];
            break;
        }
        case TermGate::Tpow:
            detail::apply1(st, n, pos_of(t.stable[0]), mat_tpow(t.tpow));
            break;
        case TermGate::CZ:
            detail::apply_cz(st, n, pos_of(t.stable[0]), pos_of(t.stable[1]));
            break;
        case TermGate::ZZ:
            detail::apply_zzz(st, n, {pos_of(t.stable[0]), pos_of(t.stable[1])}, Angle(2));
            break;
        case TermGate::ZZZ: {
            std::vector<int> ps;
            for (const auto& ix : t.stable) ps.push_back(pos_of(ix));
            detail::apply_zzz(st, n, ps, t.angle);
            break;
        }
        case TermGate::KetPlus: {
            const double s = 1.0 / std::sqrt(2.0);
            st = detail::insert_qubit(st, n, n, s, s);
            wires.push_back(t.advanced[0]);
            break;
        }
        case TermGate::ProjPlusHalfPi: {
            int p = pos_of(t.deprecated[0]);
            const double s = 1.0 / std::sqrt(2.0);
            st = detail::contract_qubit(st, n, p, s * Cplx(1, 0), s * Cplx(0, -1));
            wires.erase(wires.begin() + p);
            break;
        }
        }
    }
    // permute rows so the out register is sorted by free-out index
    std::vector<int> order(wires.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return wires[a] < wires[b]; });
    op.mat = permute_qubit_rows(st, order);
    for (int i : order) op.row_register.push_back(QubitId(wires[i].qubit));
    return op;
}

// -------- patterns --------

struct Branch {
    std::vector<int> outcomes; // aligned with BranchMap::measured
    Mat k;                     // Kraus operator, input space -> output space
};

struct BranchMap {
    std::vector<QubitId> measured;      // in measurement order
    std::vector<QubitId> in_register;   // sorted inputs
    std::vector<QubitId> out_register;  // sorted outputs
    std::vector<Branch> branches;       // outcome 0 before 1, first measurement most significant
};

namespace detail {

struct RunState {
    Mat st;
    std::vector<QubitId> live; // sorted
    std::map<QubitId, int> signal;

    int pos(const QubitId& q) const {
        auto it = std::lower_bound(live.begin(), live.end(), q);
        if (it == live.end() || *it != q) throw Error("UsedBeforePrepare", "qubit " + q.name);
        return static_cast<int>(it - live.begin());
    }
    int eval(const SignalExpr& s) const {
        int v = 0;
        for (const auto& q : s.terms) {
            auto it = signal.find(q);
            if (it != signal.end()) v ^= it->second;
        }
        return v;
    }
};

inline void run_branches(const Pattern& p, std::size_t ci, RunState st,
                         std::vector<int> outcomes, BranchMap& out) {
    for (; ci < p.commands.size(); ++ci) {
        const Command& c = p.commands[ci];
        const int n = static_cast<int>(st.live.size());
        switch (c.kind) {
        case CommandKind::Prepare: {
            auto it = std::lower_bound(st.live.begin(), st.live.end(), c.qubit);
            int pp = static_cast<int>(it - st.live.begin());
            const double s = 1.0 / std::sqrt(2.0);
            st.st = insert_qubit(st.st, n, pp, s, s);
            st.live.insert(it, c.qubit);
            break;
        }
        case CommandKind::Entangle:
            apply_cz(st.st, n, st.pos(c.qubit), st.pos(c.other));
            break;
        case CommandKind::Measure: {
            const int pp = st.pos(c.qubit);
            const int flip = st.eval(c.signal);
            const double th = (flip ? -1.0 : 1.0) * c.angle.radians();
            const double s = 1.0 / std::sqrt(2.0);
            Cplx b0[2], b1[2]; // bras for outcomes 0 and 1
            if (c.plane == Plane::XY) {
                b0[0] = s;
                b0[1] = s * std::exp(Cplx(0, -th));
                b1[0] = s;
                b1[1] = -s * std::exp(Cplx(0, -th));
            } else { // YZ
                b0[0] = std::cos(th / 2);
                b0[1] = Cplx(0, -std::sin(th / 2));
                b1[0] = std::sin(th / 2);
                b1[1] = Cplx(0, std::cos(th / 2));
            }
            RunState st1 = st;
            st1.st = contract_qubit(st1.st, n, pp, b1[0], b1[1]);
            st1.live.erase(st1.live.begin() + pp);
            st1.signal[c.qubit] = 1;
            std::vector<int> out1 = outcomes;
            out1.push_back(1);

            st.st = contract_qubit(st.st, n, pp, b0[0], b0[1]);
            st.live.erase(st.live.begin() + pp);
            st.signal[c.qubit] = 0;
            outcomes.push_back(0);
            run_branches(p, ci + 1, std::move(st), std::move(outcomes), out);
            run_branches(p, ci + 1, std::move(st1), std::move(out1), out);
            return;
        }
        case CommandKind::CorrectX:
            if (st.eval(c.signal)) apply1(st.st, n, st.pos(c.qubit), mat_x());
            break;
        case CommandKind::CorrectZ:
            if (st.eval(c.signal)) apply1(st.st, n, st.pos(c.qubit), mat_z());
            break;
        case CommandKind::Shift: {
            auto it = st.signal.find(c.qubit);
            if (it == st.signal.end()) throw Error("ForwardSignalReference", c.qubit.name);
            it->second ^= st.eval(c.signal);
            break;
        }
        }
    }
    out.branches.push_back(Branch{std::move(outcomes), std::move(st.st)});
}

} // namespace detail

inline BranchMap run_pattern(const Pattern& p, int max_qubits = 14) {
    auto [g, angles] = geometry_of(p);
    (void)angles;
    if (static_cast<int>(g.vertices.size()) > max_qubits)
        throw Error("TooLarge", "pattern acts on " + std::to_string(g.vertices.size()) + " qubits");
    BranchMap out;
    for (const Command& c : p.commands)
        if (c.kind == CommandKind::Measure) out.measured.push_back(c.qubit);
    out.in_register.assign(g.inputs.begin(), g.inputs.end());
    out.out_register.assign(g.outputs.begin(), g.outputs.end());
    detail::RunState st;
    st.live.assign(g.inputs.begin(), g.inputs.end());
    st.st = Mat::Identity(1L << st.live.size(), 1L << st.live.size());
    detail::run_branches(p, 0, std::move(st), {}, out);
    return out;
}

// max-norm of Sum K^dag K - Id
inline double trace_preservation_defect(const BranchMap& bm) {
    const long dim = 1L << bm.in_register.size();
    Mat acc = Mat::Zero(dim, dim);
    for (const Branch& b : bm.branches) acc += b.k.adjoint() * b.k;
    return (acc - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

// Choi matrix of the summed CPTP map; invariant under branch relabelling.
inline Mat choi(const BranchMap& bm) {
    const long din = 1L << bm.in_register.size();
    const long dout = 1L << bm.out_register.size();
    Mat c = Mat::Zero(din * dout, din * dout);
    for (const Branch& b : bm.branches) {
        Eigen::VectorXcd v(din * dout);
        for (long j = 0; j < din; ++j)
            for (long i = 0; i < dout; ++i) v(j * dout + i) = b.k(i, j);
        c += v * v.adjoint();
    }
    return c;
}

inline bool equal_up_to_phase(const Mat& a, const Mat& b, double tol,
                              double ref_threshold = 1e-8) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("ShapeMismatch", "operator shapes differ");
    long bi = 0, bj = 0;
    double best = -1;
    for (long i = 0; i < b.rows(); ++i)
        for (long j = 0; j < b.cols(); ++j)
            if (std::abs(b(i, j)) > best) {
                best = std::abs(b(i, j));
                bi = i;
                bj = j;
            }
    if (best < ref_threshold) return (a - b).cwiseAbs().maxCoeff() <= tol;
    Cplx phase = a(bi, bj) / b(bi, bj);
    double mag = std::abs(phase);
    if (mag < ref_threshold) return false;
    phase /= mag;
    return (a - phase * b).cwiseAbs().maxCoeff() <= tol;
}

inline bool equal_up_to_phase(const DenseOperator& a, const DenseOperator& b, double tol) {
    if (a.row_register != b.row_register || a.col_register != b.col_register)
        throw Error("ShapeMismatch", "register mismatch");
    return equal_up_to_phase(a.mat, b.mat, tol);
}

// Decide whether every branch is e^{i phi} sqrt(p_b) U for one common U.
inline std::optional<Mat> pattern_as_unitary(const Pattern& p, double tol = 1e-9,
                                             int max_qubits = 14) {
    BranchMap bm = run_pattern(p, max_qubits);
    if (bm.in_register.size() != bm.out_register.size()) return std::nullopt;
    const long dim = 1L << bm.in_register.size();
    long ref = -1;
    double best = -1;
    for (std::size_t b = 0; b < bm.branches.size(); ++b) {
        double nrm = bm.branches[b].k.norm();
        if (nrm > best) {
            best = nrm;
            ref = static_cast<long>(b);
        }
    }
    if (ref < 0 || best < 1e-12) return std::nullopt;
    Mat u = bm.branches[ref].k * (std::sqrt(static_cast<double>(dim)) / best);
    if ((u.adjoint() * u - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol * dim)
        return std::nullopt;
    for (const Branch& b : bm.branches) {
        double nrm = b.k.norm();
        Mat target = (nrm / std::sqrt(static_cast<double>(dim))) * u;
        if (nrm < 1e-12) continue;
        if (!equal_up_to_phase(b.k, target, tol)) return std::nullopt;
    }
    return u;
}

// Reorder tensor factors: perm[new_position] = old_position.
inline Mat permute_qubit_rows(const Mat& m, const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    Mat out(m.rows(), m.cols());
    for (long r = 0; r < m.rows(); ++r) {
        long nr = 0;
        for (int p = 0; p < n; ++p) {
            long bit = (r >> (n - 1 - perm[p])) & 1;
            nr |= bit << (n - 1 - p);
        }
        out.row(nr) = m.row(r);
    }
    return out;
}

inline Mat permute_qubit_cols(const Mat& m, const std::vector<int>& perm) {
    return permute_qubit_rows(m.transpose(), perm).transpose();
}

} // namespace mcal

#endif
