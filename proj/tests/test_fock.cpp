#include "doctest.h"
#include "kpgive/fock.hpp"
#include "oracle_wedge.hpp"

using namespace kpgive;

namespace {

using FV = FockVec<Scalar>;

FV unit_vec(const FockState& s, int cut) {
    FV v;
    v.n = s.n;
    v.cut = cut;
    v.t.emplace(s, Scalar(1));
    return v;
}

FockState state2(std::vector<int> p1, std::vector<int> h1, std::vector<int> p2,
                 std::vector<int> h2) {
    FockState s = FockState::vacuum(2);
    s.part[0] = std::move(p1);
    s.hole[0] = std::move(h1);
    s.part[1] = std::move(p2);
    s.hole[1] = std::move(h2);
    return s;
}

} // namespace

TEST_CASE("global slot index interleaves colors") {
    CHECK(g2_index(1, 1, 1) == 1);
    CHECK(g2_index(1, 1, -1) == -1);
    CHECK(g2_index(2, 1, 1) == 1);
    CHECK(g2_index(2, 2, 1) == 3);
    CHECK(g2_index(2, 1, -1) == -3);
    CHECK(g2_index(2, 2, -1) == -1);
    CHECK(g2_index(3, 2, 3) == 9);  // color 2, mode 3/2, n=3: (3/2-1/2)*3+2-1/2 doubled
}

TEST_CASE("state basics: energy, charge, dump format") {
    FockState s = state2({1}, {-3}, {}, {});
    CHECK(s.energy2() == 4);
    CHECK(s.charge(1) == 0);
    CHECK(s.charge(2) == 0);
    CHECK(s.dump() == "c1:p[1/2],h[-3/2];c2:-");
    CHECK(FockState::vacuum(1).dump() == "c1:-");
    FockState t = state2({1, 3}, {}, {}, {-1});
    CHECK(t.energy2() == 5);
    CHECK(t.charge(1) == 2);
    CHECK(t.charge(2) == -1);
    CHECK(t.dump() == "c1:p[1/2,3/2];c2:h[-1/2]");
}

TEST_CASE("enumerate_states matches hand counts") {
    CHECK(enumerate_states(1, 0).size() == 1);
    CHECK(enumerate_states(1, 1).size() == 3);
    CHECK(enumerate_states(1, 2).size() == 4);
    CHECK(enumerate_states(1, 4).size() == 10);
    // n=2 states are color pairs with energy split between colors.
    CHECK(enumerate_states(2, 1).size() == 5);
    for (const auto& s : enumerate_states(2, 8)) CHECK(s.energy2() <= 8);
}

TEST_CASE("psi agrees with the literal wedge-word oracle") {
    for (int n : {1, 2}) {
        long floor = g2_index(n, 1, -40) - 2 * n;
        for (const auto& s : enumerate_states(n, 6)) {
            for (int lambda : {+1, -1})
                for (int j = 1; j <= n; ++j)
                    for (int k2 = -9; k2 <= 9; k2 += 2) {
                        FockState ns = s;
                        int sg = apply_psi_state(lambda, j, k2, ns);
                        oracle::WedgeWord w = oracle::WedgeWord::from_state(s, floor);
                        int osg = oracle::psi(w, lambda, j, k2);
                        REQUIRE(sg == osg);
                        if (sg != 0) REQUIRE(ns == w.to_state());
                    }
        }
    }
}

TEST_CASE("psi grading: energy drops by the doubled mode, charge moves by one") {
    for (const auto& s : enumerate_states(2, 6))
        for (int lambda : {+1, -1})
            for (int j = 1; j <= 2; ++j)
                for (int k2 = -7; k2 <= 7; k2 += 2) {
                    FockState ns = s;
                    if (apply_psi_state(lambda, j, k2, ns) == 0) continue;
                    CHECK(ns.energy2() == s.energy2() - k2);
                    CHECK(ns.charge(j) == s.charge(j) + lambda);
                }
}

TEST_CASE("positive modes annihilate the vacuum") {
    for (int lambda : {+1, -1})
        for (int k2 = 1; k2 <= 9; k2 += 2) {
            FockState v = FockState::vacuum(1);
            CHECK(apply_psi_state(lambda, 1, k2, v) == 0);
        }
}

TEST_CASE("Clifford relations on every low-energy state") {
    // {psi^{+(i)}_a, psi^{-(j)}_b} = delta_{ij} delta_{a,-b},
    // {psi^+, psi^+} = {psi^-, psi^-} = 0.
    int n = 2, E = 6, K = 7;
    int cut = E + 4 * K + 4;  // intermediates never clipped
    auto anticomm = [&](int l1, int c1, int a2, int l2, int c2, int b2, const FV& v) {
        return apply_psi(l1, c1, a2, apply_psi(l2, c2, b2, v)) +
               apply_psi(l2, c2, b2, apply_psi(l1, c1, a2, v));
    };
    for (const auto& s : enumerate_states(n, E)) {
        FV v = unit_vec(s, cut);
        for (int a2 = -K; a2 <= K; a2 += 2)
            for (int b2 = -K; b2 <= K; b2 += 2)
                for (int ci = 1; ci <= n; ++ci)
                    for (int cj = 1; cj <= n; ++cj) {
                        FV pm = anticomm(+1, ci, a2, -1, cj, b2, v);
                        if (ci == cj && a2 == -b2) CHECK(pm == v);
                        else CHECK(pm.is_zero());
                        CHECK(anticomm(+1, ci, a2, +1, cj, b2, v).is_zero());
                        CHECK(anticomm(-1, ci, a2, -1, cj, b2, v).is_zero());
                    }
    }
}

TEST_CASE("translation operator on the vacuum and frozen two-color signs") {
    FV v0 = FV::vacuum_vec(2, 20, Scalar(1));
    // Q_i|0> = psi^{+(i)}_{-1/2}|0>.
    CHECK(apply_Q(1, +1, v0) == apply_psi(+1, 1, -1, v0));
    CHECK(apply_Q(2, +1, v0) == apply_psi(+1, 2, -1, v0));
    // Q_i^{-1}|0> = psi^{-(i)}_{-1/2}|0>.
    CHECK(apply_Q(1, -1, v0) == apply_psi(-1, 1, -1, v0));
    // Q_1 Q_2 |0> = -(canonical), Q_2 Q_1 |0> = +(canonical).
    FockState both = state2({1}, {}, {1}, {});
    CHECK(apply_Q(1, +1, apply_Q(2, +1, v0)).coeff_or(both, Scalar(0)) == Scalar(-1));
    CHECK(apply_Q(2, +1, apply_Q(1, +1, v0)).coeff_or(both, Scalar(0)) == Scalar(1));
}

TEST_CASE("translation relations hold on every low-energy state") {
    int n = 2, cut = 40;
    for (const auto& s : enumerate_states(n, 5)) {
        FV v = unit_vec(s, cut);
        // Q_i Q_i^{-1} = Q_i^{-1} Q_i = id.
        for (int i = 1; i <= n; ++i) {
            CHECK(apply_Q(i, -1, apply_Q(i, +1, v)) == v);
            CHECK(apply_Q(i, +1, apply_Q(i, -1, v)) == v);
        }
        // Q_1 Q_2 = -Q_2 Q_1.
        FV a = apply_Q(1, +1, apply_Q(2, +1, v));
        FV b = apply_Q(2, +1, apply_Q(1, +1, v));
        CHECK((a + b).is_zero());
        // Q_i psi^{(j)} Q_i^{-1} shifts same-color modes and flips the
        // sign of other-color modes.
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int lambda : {+1, -1})
                    for (int k2 = -5; k2 <= 5; k2 += 2) {
                        FV lhs = apply_Q(i, +1, apply_psi(lambda, j, k2, apply_Q(i, -1, v)));
                        int shift = (i == j) ? (lambda > 0 ? -2 : 2) : 0;
                        FV rhs = apply_psi(lambda, j, k2 + shift, v);
                        if (i != j) rhs.scale(Scalar(-1));
                        CHECK(lhs == rhs);
                    }
    }
}

TEST_CASE("charged vacua have minimal energy and replayable signs") {
    for (int n : {1, 2, 3}) {
        std::vector<std::vector<int>> charges;
        if (n == 1) charges = {{0}, {1}, {-1}, {2}, {-3}};
        if (n == 2) charges = {{0, 0}, {1, 0}, {0, 1}, {1, -1}, {2, 1}, {-1, -1}};
        if (n == 3) charges = {{0, 0, 0}, {1, 1, 0}, {-1, 0, 2}};
        for (const auto& c : charges) {
            auto [s, sg] = charged_vacuum(n, c);
            int e = 0;
            for (int x : c) e += x * x;
            CHECK(s.energy2() == e);
            CHECK(s.charges() == c);
            CHECK((sg == 1 || sg == -1));
        }
    }
    // One-color charged vacua are hook-free: |k> occupies the k lowest
    // positive slots, with sign +1 in this operator ordering.
    auto [s2, sg2] = charged_vacuum(1, {2});
    CHECK(s2.part[0] == std::vector<int>{1, 3});
    CHECK(sg2 == 1);
    auto [sm1, sgm1] = charged_vacuum(1, {-2});
    CHECK(sm1.hole[0] == std::vector<int>{-3, -1});
    CHECK(sgm1 == 1);
}

TEST_CASE("oscillators match the literal normal-ordered sum") {
    for (int n : {1, 2}) {
        for (const auto& s : enumerate_states(n, 5)) {
            for (int ci = 1; ci <= n; ++ci)
                for (int cj = 1; cj <= n; ++cj)
                    for (int k = -3; k <= 3; ++k) {
                        FV v = unit_vec(s, s.energy2() + 2 * std::abs(k) + 12);
                        FV got = apply_alpha(ci, cj, k, v);
                        auto want = oracle::alpha(ci, cj, k, s, s.energy2() + 2 * std::abs(k) + 9);
                        REQUIRE(got.t.size() == want.size());
                        for (const auto& [ns, coeff] : want)
                            CHECK(got.coeff_or(ns, Scalar(0)) == Scalar(coeff));
                    }
        }
    }
}

TEST_CASE("oscillator gradings and vacuum annihilation") {
    FV v0 = FV::vacuum_vec(2, 30, Scalar(1));
    for (int k = 1; k <= 4; ++k)
        for (int ci = 1; ci <= 2; ++ci)
            for (int cj = 1; cj <= 2; ++cj) CHECK(apply_alpha(ci, cj, k, v0).is_zero());
    // k=0, ci<cj also annihilates the vacuum; diagonal k=0 reads the charge.
    CHECK(apply_alpha(1, 2, 0, v0).is_zero());
    for (const auto& s : enumerate_states(2, 5)) {
        FV v = unit_vec(s, 40);
        for (int j = 1; j <= 2; ++j) {
            FV q = apply_alpha(j, j, 0, v);
            FV expect = v;
            expect.scale(Scalar(s.charge(j)));
            CHECK(q == expect);
        }
        for (int k = -3; k <= 3; ++k) {
            for (const auto& [ns, c] : apply_alpha(1, 1, k, v).t)
                CHECK(ns.energy2() == s.energy2() - 2 * k);
        }
    }
}

TEST_CASE("Heisenberg commutators on every low-energy state") {
    // [alpha^{(i)}_k, alpha^{(j)}_l] = k delta_{ij} delta_{k,-l}.
    int n = 2;
    for (const auto& s : enumerate_states(n, 5)) {
        for (int k = -3; k <= 3; ++k)
            for (int l = -3; l <= 3; ++l) {
                if (k == 0 || l == 0) continue;
                FV v = unit_vec(s, s.energy2() + 2 * (std::abs(k) + std::abs(l)) + 4);
                for (int ci = 1; ci <= n; ++ci)
                    for (int cj = 1; cj <= n; ++cj) {
                        FV comm = apply_alpha(ci, ci, k, apply_alpha(cj, cj, l, v)) -
                                  apply_alpha(cj, cj, l, apply_alpha(ci, ci, k, v));
                        if (ci == cj && k == -l) {
                            FV expect = v;
                            expect.scale(Scalar(k));
                            CHECK(comm == expect);
                        } else {
                            CHECK(comm.is_zero());
                        }
                    }
            }
    }
}

TEST_CASE("color-pair oscillators close into the level-one algebra") {
    // [alpha^{(ij)}_p, alpha^{(kl)}_q] = delta_{jk} alpha^{(il)}_{p+q}
    //   - delta_{il} alpha^{(kj)}_{p+q} + p delta_{il} delta_{jk} delta_{p,-q}.
    int n = 2;
    auto states = enumerate_states(n, 4);
    for (const auto& s : states) {
        for (int p = -2; p <= 2; ++p)
            for (int q = -2; q <= 2; ++q)
                for (int i = 1; i <= n; ++i)
                    for (int j = 1; j <= n; ++j)
                        for (int k = 1; k <= n; ++k)
                            for (int l = 1; l <= n; ++l) {
                                FV v = unit_vec(s, s.energy2() + 2 * (std::abs(p) + std::abs(q)) + 4);
                                FV comm = apply_alpha(i, j, p, apply_alpha(k, l, q, v)) -
                                          apply_alpha(k, l, q, apply_alpha(i, j, p, v));
                                FV rhs;
                                rhs.n = n;
                                rhs.cut = v.cut;
                                if (j == k) rhs += apply_alpha(i, l, p + q, v);
                                if (i == l) rhs -= apply_alpha(k, j, p + q, v);
                                if (i == l && j == k && p == -q) {
                                    FV central = v;
                                    central.scale(Scalar(p));
                                    rhs += central;
                                }
                                CHECK(comm == rhs);
                            }
    }
}

TEST_CASE("oscillators commute with translations up to the charge shift") {
    // [alpha^{(i)}_k, Q_j] = delta_{ij} delta_{k0} Q_j.
    int n = 2;
    for (const auto& s : enumerate_states(n, 4)) {
        FV v = unit_vec(s, 40);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = -2; k <= 2; ++k) {
                    FV lhs = apply_alpha(i, i, k, apply_Q(j, +1, v)) -
                             apply_Q(j, +1, apply_alpha(i, i, k, v));
                    if (i == j && k == 0) CHECK(lhs == apply_Q(j, +1, v));
                    else CHECK(lhs.is_zero());
                }
    }
}
