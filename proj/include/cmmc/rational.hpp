#pragma once

#include <gmpxx.h>

#include <string>

namespace cmmc {

/// Exact rational arithmetic (GMP-backed). Always kept in canonical reduced
/// form with a positive denominator. Factorials like (n+m)! at the scales
/// used here vastly exceed 64-bit integers, so everything in the exact
/// distribution theory runs on this type.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long v) : q_(v) {}
    Rational(long num, long den) : q_(num, den) { q_.canonicalize(); }
    explicit Rational(const mpz_class& v) : q_(v) {}
    explicit Rational(const mpq_class& v) : q_(v) { q_.canonicalize(); }

    static Rational factorial(unsigned long n) {
        mpz_class f;
        mpz_fac_ui(f.get_mpz_t(), n);
        return Rational(f);
    }

    static Rational binomial(unsigned long n, unsigned long k) {
        if (k > n) return Rational(0);
        mpz_class b;
        mpz_bin_uiui(b.get_mpz_t(), n, k);
        return Rational(b);
    }

    static Rational pow_int(const Rational& base, unsigned long e) {
        Rational out(1);
        Rational acc = base;
        while (e) {
            if (e & 1UL) out *= acc;
            acc *= acc;
            e >>= 1UL;
        }
        return out;
    }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) { q_ /= o.q_; return *this; }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(0) - a; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    double to_double() const { return q_.get_d(); }
    std::string str() const { return q_.get_str(); }

private:
    mpq_class q_;
};

} // namespace cmmc
