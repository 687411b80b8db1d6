#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

#include "kpgive/errors.hpp"

namespace kpgive {

// Exact rational number. Thin wrapper over GMP's mpq_class that pins the
// operations the rest of the library relies on: exact +,-,*,/ and a
// division-by-zero error instead of undefined behavior.
class Scalar {
  public:
    Scalar() : v_(0) {}
    Scalar(long num) : v_(num) {}
    Scalar(long num, long den) : v_(num, den) {
        if (den == 0) throw StructuralError("Scalar: zero denominator");
        v_.canonicalize();
    }
    explicit Scalar(const mpq_class& v) : v_(v) { v_.canonicalize(); }

    static Scalar zero() { return Scalar(0); }
    static Scalar one() { return Scalar(1); }

    // Accepts "p" or "p/q" with optional sign, exactly the wire format.
    static Scalar parse(const std::string& s) {
        if (s.empty()) throw InconsistentInput("Scalar: empty literal");
        mpq_class v;
        if (v.set_str(s, 10) != 0)
            throw InconsistentInput("Scalar: bad literal '" + s + "'");
        if (v.get_den() == 0)
            throw InconsistentInput("Scalar: zero denominator in '" + s + "'");
        v.canonicalize();
        return Scalar(v);
    }

    // Canonical form: "p" when the denominator is 1, else "p/q" with q > 0.
    std::string str() const { return v_.get_str(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_one() const { return v_ == 1; }
    // Gate used by series inversion.
    bool is_invertible() const { return !is_zero(); }

    Scalar inverse() const {
        if (is_zero()) throw StructuralError("Scalar: inverse of zero");
        return Scalar(mpq_class(1) / v_);
    }

    Scalar operator-() const { return Scalar(mpq_class(-v_)); }
    Scalar& operator+=(const Scalar& o) { v_ += o.v_; return *this; }
    Scalar& operator-=(const Scalar& o) { v_ -= o.v_; return *this; }
    Scalar& operator*=(const Scalar& o) { v_ *= o.v_; return *this; }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw StructuralError("Scalar: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return a.v_ != b.v_; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return a.v_ < b.v_; }

    const mpq_class& raw() const { return v_; }

  private:
    mpq_class v_;
};

inline Scalar factorial_inverse(int p) {
    mpz_class f = 1;
    for (int i = 2; i <= p; ++i) f *= i;
    return Scalar(mpq_class(1, f));
}

} // namespace kpgive
