#ifndef MCAL_ANGLE_HPP
#define MCAL_ANGLE_HPP

namespace mcal {

// Exact multiples of pi/4, canonicalized so eighths lies in {-3,...,4}.
// theta = eighths * (pi/4).
struct Angle {
    int eighths = 0;

    Angle() = default;
    explicit Angle(int e) : eighths(canonical(e)) {}

    static int canonical(int e) {
        int r = e % 8;
        if (r > 4) r -= 8;
        if (r <= -4) r += 8;
        return r;
    }

    Angle operator-() const { return Angle(-eighths); }
    Angle operator+(const Angle& o) const { return Angle(eighths + o.eighths); }

    bool is_pauli_x() const { return eighths == 0 || eighths == 4; } // 0 or pi
    bool is_pauli_y() const { return eighths == 2 || eighths == -2; } // +-pi/2

    double radians() const;

    bool operator==(const Angle& o) const { return eighths == o.eighths; }
    bool operator!=(const Angle& o) const { return eighths != o.eighths; }
};

inline double Angle::radians() const {
    constexpr double pi = 3.14159265358979323846264338327950288;
    return eighths * (pi / 4.0);
}

} // namespace mcal

#endif
