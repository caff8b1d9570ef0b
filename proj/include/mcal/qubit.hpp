#ifndef MCAL_QUBIT_HPP
#define MCAL_QUBIT_HPP

#include <cctype>
#include <compare>
#include <set>
#include <string>

namespace mcal {

// Qubit names are opaque tokens. Ordering is "natural": runs of digits
// compare numerically, so v2 < v10. This keeps generated names stable.
inline int natural_compare(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) &&
            std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            // skip leading zeros
            std::size_t ia = i, jb = j;
            while (ia < i2 - 1 && a[ia] == '0') ++ia;
            while (jb < j2 - 1 && b[jb] == '0') ++jb;
            std::size_t la = i2 - ia, lb = j2 - jb;
            if (la != lb) return la < lb ? -1 : 1;
            for (; ia < i2; ++ia, ++jb) {
                if (a[ia] != b[jb]) return a[ia] < b[jb] ? -1 : 1;
            }
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j] ? -1 : 1;
            ++i;
            ++j;
        }
    }
    if (i < a.size()) return 1;
    if (j < b.size()) return -1;
    return 0;
}

struct QubitId {
    std::string name;

    QubitId() = default;
    explicit QubitId(std::string n) : name(std::move(n)) {}

    bool operator==(const QubitId& o) const { return name == o.name; }
    bool operator!=(const QubitId& o) const { return name != o.name; }
    bool operator<(const QubitId& o) const { return natural_compare(name, o.name) < 0; }
    bool operator>(const QubitId& o) const { return o < *this; }
    bool operator<=(const QubitId& o) const { return !(o < *this); }
    bool operator>=(const QubitId& o) const { return !(*this < o); }
};

// Parity of measurement outcomes: s[a] + s[b] + ... mod 2.
// The empty set is the constant 0. Symmetric difference is the group op.
struct SignalExpr {
    std::set<QubitId> terms;

    SignalExpr() = default;
    explicit SignalExpr(std::set<QubitId> t) : terms(std::move(t)) {}
    SignalExpr(std::initializer_list<QubitId> t) : terms(t) {}

    bool empty() const { return terms.empty(); }

    SignalExpr& operator^=(const SignalExpr& o) {
        for (const auto& q : o.terms) {
            auto it = terms.find(q);
            if (it != terms.end())
                terms.erase(it);
            else
                terms.insert(q);
        }
        return *this;
    }
    friend SignalExpr operator^(SignalExpr a, const SignalExpr& b) {
        a ^= b;
        return a;
    }
    void toggle(const QubitId& q) {
        auto it = terms.find(q);
        if (it != terms.end())
            terms.erase(it);
        else
            terms.insert(q);
    }
    bool mentions(const QubitId& q) const { return terms.count(q) != 0; }

    bool operator==(const SignalExpr& o) const { return terms == o.terms; }
    bool operator!=(const SignalExpr& o) const { return terms != o.terms; }
};

} // namespace mcal

#endif
