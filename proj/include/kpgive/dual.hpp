#pragma once

#include <string>

#include "kpgive/rational.hpp"

namespace kpgive {

// Dual number a + b*eps with eps^2 = 0 over exact rationals. Running a
// computation over this ring instead of Scalar yields the exact first
// derivative along the eps direction with no extra code paths.
class DualScalar {
  public:
    DualScalar() = default;
    DualScalar(long n) : a_(n) {}
    DualScalar(Scalar value) : a_(std::move(value)) {}
    DualScalar(Scalar value, Scalar eps) : a_(std::move(value)), b_(std::move(eps)) {}

    static DualScalar zero() { return DualScalar(); }
    static DualScalar one() { return DualScalar(1); }
    static DualScalar eps(Scalar b) { return DualScalar(Scalar::zero(), std::move(b)); }

    const Scalar& value() const { return a_; }
    const Scalar& eps_part() const { return b_; }

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool is_one() const { return a_.is_one() && b_.is_zero(); }
    // Gate used by series inversion: an eps component never obstructs
    // invertibility, only a vanishing value part does.
    bool is_invertible() const { return a_.is_invertible(); }

    // (a + b eps)^-1 = a^-1 - a^-2 b eps.
    DualScalar inverse() const {
        Scalar ia = a_.inverse();
        return DualScalar(ia, -(ia * ia * b_));
    }

    DualScalar operator-() const { return DualScalar(-a_, -b_); }
    DualScalar& operator+=(const DualScalar& o) { a_ += o.a_; b_ += o.b_; return *this; }
    DualScalar& operator-=(const DualScalar& o) { a_ -= o.a_; b_ -= o.b_; return *this; }
    DualScalar& operator*=(const DualScalar& o) {
        b_ = a_ * o.b_ + b_ * o.a_;
        a_ *= o.a_;
        return *this;
    }
    DualScalar& operator/=(const DualScalar& o) { return *this *= o.inverse(); }

    friend DualScalar operator+(DualScalar a, const DualScalar& b) { return a += b; }
    friend DualScalar operator-(DualScalar a, const DualScalar& b) { return a -= b; }
    friend DualScalar operator*(DualScalar a, const DualScalar& b) { return a *= b; }
    friend DualScalar operator/(DualScalar a, const DualScalar& b) { return a /= b; }

    friend bool operator==(const DualScalar& x, const DualScalar& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const DualScalar& x, const DualScalar& y) { return !(x == y); }

    std::string str() const { return a_.str() + "+eps*" + b_.str(); }

  private:
    Scalar a_;
    Scalar b_;
};

// Uniform hooks so templated code can treat Scalar and DualScalar alike.
template <class R> inline R ring_from_rational(const Scalar& s);
template <> inline Scalar ring_from_rational<Scalar>(const Scalar& s) { return s; }
template <> inline DualScalar ring_from_rational<DualScalar>(const Scalar& s) {
    return DualScalar(s);
}

} // namespace kpgive
