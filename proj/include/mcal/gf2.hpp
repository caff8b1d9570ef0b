#ifndef MCAL_GF2_HPP
#define MCAL_GF2_HPP

#include <bit>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace mcal {

struct Gf2Vec {
    std::size_t n = 0;
    std::vector<std::uint64_t> w;

    Gf2Vec() = default;
    explicit Gf2Vec(std::size_t size) : n(size), w((size + 63) / 64, 0) {}

    bool get(std::size_t i) const { return (w[i / 64] >> (i % 64)) & 1; }
    void set(std::size_t i, bool b) {
        std::uint64_t m = std::uint64_t(1) << (i % 64);
        if (b) w[i / 64] |= m; else w[i / 64] &= ~m;
    }
    void flip(std::size_t i) { w[i / 64] ^= std::uint64_t(1) << (i % 64); }
    bool any() const {
        for (auto x : w) if (x) return true;
        return false;
    }
    Gf2Vec& operator^=(const Gf2Vec& o) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i];
        return *this;
    }
    bool operator==(const Gf2Vec& o) const { return n == o.n && w == o.w; }

    static bool dot(const Gf2Vec& a, const Gf2Vec& b) {
        int acc = 0;
        for (std::size_t i = 0; i < a.w.size(); ++i)
            acc ^= std::popcount(a.w[i] & b.w[i]) & 1;
        return acc;
    }
};

// Square boolean matrix, rows packed.
struct Gf2Matrix {
    std::size_t n = 0;
    std::vector<Gf2Vec> rows;

    Gf2Matrix() = default;
    explicit Gf2Matrix(std::size_t size) : n(size), rows(size, Gf2Vec(size)) {}

    bool get(std::size_t r, std::size_t c) const { return rows[r].get(c); }
    void set(std::size_t r, std::size_t c, bool b) { rows[r].set(c, b); }

    Gf2Vec mul(const Gf2Vec& v) const {
        Gf2Vec out(n);
        for (std::size_t r = 0; r < n; ++r)
            if (Gf2Vec::dot(rows[r], v)) out.set(r, true);
        return out;
    }
    Gf2Vec col(std::size_t c) const {
        Gf2Vec out(n);
        for (std::size_t r = 0; r < n; ++r)
            if (rows[r].get(c)) out.set(r, true);
        return out;
    }
    Gf2Matrix mul(const Gf2Matrix& o) const {
        Gf2Matrix out(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t k = 0; k < n; ++k)
                if (rows[r].get(k)) out.rows[r] ^= o.rows[k];
        }
        return out;
    }
    bool operator==(const Gf2Matrix& o) const { return n == o.n && rows == o.rows; }

    static Gf2Matrix identity(std::size_t n) {
        Gf2Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }
};

// Sum of powers of a nilpotent matrix: (I - T)^-1 = I + T + T^2 + ...
// Returns the series; callers should know T is nilpotent (the loop stops
// after n steps regardless).
inline Gf2Matrix neumann_inverse(const Gf2Matrix& t) {
    Gf2Matrix acc = Gf2Matrix::identity(t.n);
    Gf2Matrix pw = t;
    for (std::size_t step = 0; step < t.n; ++step) {
        bool nonzero = false;
        for (const auto& r : pw.rows)
            if (r.any()) { nonzero = true; break; }
        if (!nonzero) break;
        for (std::size_t r = 0; r < t.n; ++r) acc.rows[r] ^= pw.rows[r];
        pw = pw.mul(t);
    }
    return acc;
}

// Gaussian elimination mod 2: a solution of A x = b, or absent when the
// system is inconsistent. Free variables are set to zero.
inline std::optional<Gf2Vec> gf2_solve(Gf2Matrix a, Gf2Vec b) {
    const std::size_t n = a.n;
    std::vector<std::size_t> pivot_col; // pivot column of each eliminated row
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t p = row;
        while (p < n && !a.get(p, col)) ++p;
        if (p == n) continue;
        std::swap(a.rows[p], a.rows[row]);
        bool bp = b.get(p), br = b.get(row);
        b.set(p, br);
        b.set(row, bp);
        for (std::size_t r = 0; r < n; ++r) {
            if (r != row && a.get(r, col)) {
                a.rows[r] ^= a.rows[row];
                if (b.get(row)) b.flip(r);
            }
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < n; ++r)
        if (b.get(r)) return std::nullopt;
    Gf2Vec x(n);
    for (std::size_t r = 0; r < row; ++r)
        if (b.get(r)) x.set(pivot_col[r], true);
    return x;
}

} // namespace mcal

#endif
