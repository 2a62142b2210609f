#pragma once

// Exact arithmetic in Z[zeta], zeta = exp(2*pi*i/16). An element is stored as
// integer coefficients of 1, zeta, ..., zeta^7 with the reduction zeta^8 = -1.
// Every amplitude and phase in the simulator lives in this ring (states carry
// a separate power-of-sqrt2 denominator), so equality checks are exact.
//
// sqrt(2) = zeta^2 - zeta^6 is in the ring; dividing by sqrt(2) is multiplying
// by sqrt(2) and halving, which is exact precisely when all coefficients stay
// integral (asserted).

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cupcode {

struct Zeta16 {
    std::array<int64_t, 8> c{}; // c[k] multiplies zeta^k

    Zeta16() = default;

    static Zeta16 zero() { return Zeta16{}; }

    static Zeta16 one() { return zeta_pow(0); }

    // zeta^k, any integer k.
    static Zeta16 zeta_pow(int64_t k) {
        Zeta16 z;
        k %= 16;
        if (k < 0)
            k += 16;
        if (k < 8)
            z.c[k] = 1;
        else
            z.c[k - 8] = -1;
        return z;
    }

    static Zeta16 from_int(int64_t n) {
        Zeta16 z;
        z.c[0] = n;
        return z;
    }

    static Zeta16 sqrt2() { return zeta_pow(2) - zeta_pow(6); }

    bool is_zero() const {
        for (int64_t x : c)
            if (x)
                return false;
        return true;
    }

    // Rational means: lies in Z (no nontrivial zeta component).
    bool is_rational() const {
        for (int k = 1; k < 8; ++k)
            if (c[k])
                return false;
        return true;
    }

    Zeta16 operator+(const Zeta16& o) const {
        Zeta16 r;
        for (int k = 0; k < 8; ++k)
            r.c[k] = c[k] + o.c[k];
        return r;
    }

    Zeta16 operator-(const Zeta16& o) const {
        Zeta16 r;
        for (int k = 0; k < 8; ++k)
            r.c[k] = c[k] - o.c[k];
        return r;
    }

    Zeta16& operator+=(const Zeta16& o) { return *this = *this + o; }

    Zeta16 operator*(const Zeta16& o) const {
        std::array<int64_t, 16> t{};
        for (int i = 0; i < 8; ++i) {
            if (!c[i])
                continue;
            for (int j = 0; j < 8; ++j)
                t[i + j] += c[i] * o.c[j];
        }
        Zeta16 r;
        for (int k = 0; k < 8; ++k)
            r.c[k] = t[k] - t[k + 8];
        return r;
    }

    // Multiply by zeta^k in place (cheap rotation).
    Zeta16 times_zeta_pow(int64_t k) const { return *this * zeta_pow(k); }

    Zeta16 conj() const {
        Zeta16 r;
        r.c[0] = c[0];
        for (int k = 1; k < 8; ++k)
            r.c[k] = -c[8 - k];
        return r;
    }

    // |z|^2 when it happens to be a rational integer; throws otherwise.
    // Projector-generated states in this codebase always have rational norms.
    int64_t norm2_int() const {
        Zeta16 n = *this * conj();
        if (!n.is_rational())
            throw std::runtime_error("Zeta16: norm^2 is not rational");
        return n.c[0];
    }

    // Exact halving; throws if any coefficient is odd.
    Zeta16 half() const {
        Zeta16 r;
        for (int k = 0; k < 8; ++k) {
            if (c[k] & 1)
                throw std::runtime_error("Zeta16: inexact division by 2");
            r.c[k] = c[k] / 2;
        }
        return r;
    }

    // Exact division by sqrt(2): multiply by sqrt(2), then halve.
    Zeta16 div_sqrt2() const { return (*this * sqrt2()).half(); }

    bool operator==(const Zeta16& o) const { return c == o.c; }
    bool operator!=(const Zeta16& o) const { return c != o.c; }

    // If this equals zeta^k for some k in [0,16), return k; else -1.
    int as_zeta_power() const {
        for (int k = 0; k < 16; ++k)
            if (*this == zeta_pow(k))
                return k;
        return -1;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (int k = 0; k < 8; ++k) {
            if (!c[k])
                continue;
            if (!first)
                os << (c[k] > 0 ? " + " : " - ");
            else if (c[k] < 0)
                os << "-";
            int64_t a = c[k] > 0 ? c[k] : -c[k];
            if (a != 1 || k == 0)
                os << a;
            if (k > 0) {
                if (a != 1)
                    os << "*";
                os << "zeta";
                if (k > 1)
                    os << "^" << k;
            }
            first = false;
        }
        if (first)
            os << "0";
        return os.str();
    }
};

} // namespace cupcode
