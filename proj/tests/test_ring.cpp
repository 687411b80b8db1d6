#include <random>

#include "doctest.h"
#include "kpgive/dual.hpp"
#include "kpgive/rational.hpp"

using namespace kpgive;

namespace {

std::mt19937_64 rng(20260815u);

Scalar random_scalar(bool nonzero = false) {
    std::uniform_int_distribution<long> num(-12, 12);
    std::uniform_int_distribution<long> den(1, 9);
    for (;;) {
        Scalar s(num(rng), den(rng));
        if (!nonzero || !s.is_zero()) return s;
    }
}

DualScalar random_dual(bool invertible = false) {
    return DualScalar(random_scalar(invertible), random_scalar());
}

} // namespace

TEST_CASE("rational arithmetic is exact and canonical") {
    CHECK(Scalar(2, 4) == Scalar(1, 2));
    CHECK(Scalar(-3, -6) == Scalar(1, 2));
    CHECK((Scalar(1, 3) + Scalar(1, 6)) == Scalar(1, 2));
    CHECK((Scalar(1, 3) * Scalar(3, 5)) == Scalar(1, 5));
    CHECK((Scalar(7, 2) - Scalar(7, 2)).is_zero());
    CHECK(Scalar(5, 7).inverse() == Scalar(7, 5));
    CHECK_THROWS_AS(Scalar(0).inverse(), StructuralError);
    CHECK_THROWS_AS(Scalar(1, 0), StructuralError);
}

TEST_CASE("rational parse/print round trip") {
    CHECK(Scalar::parse("3/4").str() == "3/4");
    CHECK(Scalar::parse("-6/8").str() == "-3/4");
    CHECK(Scalar::parse("5").str() == "5");
    CHECK(Scalar::parse("0").is_zero());
    CHECK_THROWS_AS(Scalar::parse(""), InconsistentInput);
    CHECK_THROWS_AS(Scalar::parse("abc"), InconsistentInput);
    CHECK_THROWS_AS(Scalar::parse("1/0"), InconsistentInput);
    for (int i = 0; i < 50; ++i) {
        Scalar s = random_scalar();
        CHECK(Scalar::parse(s.str()) == s);
    }
}

TEST_CASE("ring axioms hold on random rationals") {
    for (int i = 0; i < 200; ++i) {
        Scalar x = random_scalar(), y = random_scalar(), z = random_scalar();
        CHECK((x + y) + z == x + (y + z));
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x + y == y + x);
        CHECK(x * y == y * x);
        CHECK((x + (-x)).is_zero());
    }
}

TEST_CASE("dual numbers square eps to zero") {
    DualScalar e = DualScalar::eps(Scalar(1));
    CHECK((e * e).is_zero());
    DualScalar d(Scalar(3), Scalar(5));
    CHECK((d * d) == DualScalar(Scalar(9), Scalar(30)));
}

TEST_CASE("dual ring axioms hold on random elements") {
    for (int i = 0; i < 200; ++i) {
        DualScalar x = random_dual(), y = random_dual(), z = random_dual();
        CHECK((x + y) + z == x + (y + z));
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x * y == y * x);
    }
}

TEST_CASE("dual inverse law") {
    for (int i = 0; i < 100; ++i) {
        DualScalar d = random_dual(true);
        CHECK(d * d.inverse() == DualScalar::one());
        // (a + b eps)^-1 = a^-1 - a^-2 b eps
        Scalar ia = d.value().inverse();
        CHECK(d.inverse() == DualScalar(ia, -(ia * ia * d.eps_part())));
    }
    CHECK_THROWS_AS(DualScalar::eps(Scalar(1)).inverse(), StructuralError);
    CHECK_FALSE(DualScalar::eps(Scalar(3)).is_invertible());
    // Gate for series inversion: a nonzero value part suffices even with an
    // eps component in the constant.
    CHECK(DualScalar(Scalar(1), Scalar(7)).is_invertible());
    CHECK(DualScalar(Scalar(2), Scalar(0)).is_invertible());
}

TEST_CASE("derivative of a product via dual numbers") {
    // f(u) = u^3 at u = 2 + eps: value 8, derivative 12.
    DualScalar u(Scalar(2), Scalar(1));
    DualScalar f = u * u * u;
    CHECK(f.value() == Scalar(8));
    CHECK(f.eps_part() == Scalar(12));
}
