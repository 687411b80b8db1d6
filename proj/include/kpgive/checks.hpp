#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kpgive/gamma.hpp"
#include "kpgive/parallel.hpp"

namespace kpgive {

// Outcome of one exhaustive relation sweep over a truncated basis. cases
// counts relation instances evaluated; first_failure names the earliest
// failing state and relation in basis order.
struct CheckResult {
    std::string name;
    long cases = 0;
    bool ok = true;
    std::string first_failure;
};

namespace detail {

inline FockVec<Scalar> unit_state_vec(const FockState& s, int cut) {
    FockVec<Scalar> v;
    v.n = s.n;
    v.cut = cut;
    v.t.emplace(s, Scalar(1));
    return v;
}

// Parallel sweep: body(state, cases, failure) runs per basis state and
// appends to its own tallies; reduction in basis order keeps the reported
// first failure deterministic.
template <class Body>
CheckResult sweep_states(const std::string& name, int n, int E, Body&& body) {
    std::vector<FockState> states = enumerate_states(n, E);
    std::vector<long> cases(states.size(), 0);
    std::vector<std::string> failure(states.size());
    parallel_for(static_cast<long>(states.size()), [&](long i) {
        body(states[i], cases[i], failure[i]);
    });
    CheckResult r;
    r.name = name;
    for (std::size_t i = 0; i < states.size(); ++i) {
        r.cases += cases[i];
        if (r.ok && !failure[i].empty()) {
            r.ok = false;
            r.first_failure = states[i].dump() + ": " + failure[i];
        }
    }
    return r;
}

} // namespace detail

// {psi^{+(i)}_a, psi^{-(j)}_b} = delta_{ij} delta_{a,-b}, same-sign pairs
// anticommute to zero, and the lattice translations: Q_i Q_i^{-1} = id,
// Q_1 Q_2 = -Q_2 Q_1, Q_i psi^{(j)} Q_i^{-1} = same-color mode shift or
// other-color sign flip. Modes run over |a2| <= K (doubled, odd).
inline CheckResult check_clifford(int n, int E, int K = 5) {
    int cut = E + 4 * K + 4;
    return detail::sweep_states("clifford", n, E, [&](const FockState& s, long& cases,
                                                      std::string& failure) {
        using FV = FockVec<Scalar>;
        FV v = detail::unit_state_vec(s, cut);
        auto anticomm = [&](int l1, int c1, int a2, int l2, int c2, int b2) {
            return apply_psi(l1, c1, a2, apply_psi(l2, c2, b2, v)) +
                   apply_psi(l2, c2, b2, apply_psi(l1, c1, a2, v));
        };
        auto fail = [&](const std::string& what) {
            if (failure.empty()) failure = what;
        };
        for (int a2 = -K; a2 <= K; a2 += 2)
            for (int b2 = -K; b2 <= K; b2 += 2)
                for (int ci = 1; ci <= n; ++ci)
                    for (int cj = 1; cj <= n; ++cj) {
                        FV pm = anticomm(+1, ci, a2, -1, cj, b2);
                        bool good = (ci == cj && a2 == -b2) ? pm == v : pm.is_zero();
                        ++cases;
                        if (!good) fail("anticommutator {+,-}");
                        ++cases;
                        if (!anticomm(+1, ci, a2, +1, cj, b2).is_zero())
                            fail("anticommutator {+,+}");
                        ++cases;
                        if (!anticomm(-1, ci, a2, -1, cj, b2).is_zero())
                            fail("anticommutator {-,-}");
                    }
        for (int i = 1; i <= n; ++i) {
            ++cases;
            if (!(apply_Q(i, -1, apply_Q(i, +1, v)) == v &&
                  apply_Q(i, +1, apply_Q(i, -1, v)) == v))
                fail("Q inverse");
        }
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                ++cases;
                if (!(apply_Q(i, +1, apply_Q(j, +1, v)) +
                      apply_Q(j, +1, apply_Q(i, +1, v)))
                         .is_zero())
                    fail("Q anticommutation");
            }
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int lambda : {+1, -1})
                    for (int k2 = -K; k2 <= K; k2 += 2) {
                        FV lhs = apply_Q(i, +1, apply_psi(lambda, j, k2, apply_Q(i, -1, v)));
                        int shift = (i == j) ? (lambda > 0 ? -2 : 2) : 0;
                        FV rhs = apply_psi(lambda, j, k2 + shift, v);
                        if (i != j) rhs.scale(Scalar(-1));
                        ++cases;
                        if (!(lhs == rhs)) fail("Q psi conjugation");
                    }
    });
}

// Oscillator relations: [alpha^{(i)}_k, alpha^{(j)}_l] = k delta_{ij}
// delta_{k,-l} for k, l in [-kmax, kmax] \ {0}, and the diagonal zero mode
// reads the charge.
inline CheckResult check_gamma(int n, int E, int kmax = 3) {
    return detail::sweep_states("gamma", n, E, [&](const FockState& s, long& cases,
                                                   std::string& failure) {
        using FV = FockVec<Scalar>;
        auto fail = [&](const std::string& what) {
            if (failure.empty()) failure = what;
        };
        for (int k = -kmax; k <= kmax; ++k)
            for (int l = -kmax; l <= kmax; ++l) {
                if (k == 0 || l == 0) continue;
                FV v = detail::unit_state_vec(s, s.energy2() + 2 * (std::abs(k) + std::abs(l)) + 4);
                for (int ci = 1; ci <= n; ++ci)
                    for (int cj = 1; cj <= n; ++cj) {
                        FV comm = apply_alpha(ci, ci, k, apply_alpha(cj, cj, l, v)) -
                                  apply_alpha(cj, cj, l, apply_alpha(ci, ci, k, v));
                        bool good;
                        if (ci == cj && k == -l) {
                            FV expect = v;
                            expect.scale(Scalar(k));
                            good = comm == expect;
                        } else {
                            good = comm.is_zero();
                        }
                        ++cases;
                        if (!good) fail("oscillator commutator");
                    }
            }
        FV v = detail::unit_state_vec(s, s.energy2() + 4);
        for (int j = 1; j <= n; ++j) {
            FV q = apply_alpha(j, j, 0, v);
            FV expect = v;
            expect.scale(Scalar(s.charge(j)));
            ++cases;
            if (!(q == expect)) fail("zero-mode charge");
        }
    });
}

// Vertex identity psi^{+-(i)}(z) = Q_i^{+-1} z^{+-alpha_0^{(i)}}
// Gamma_-(+-[z]) Gamma_+(-+[z^{-1}]) on every basis state, compared on the
// z window [-zwin, zwin] and energies <= E. The internal cutoff is exact
// per state: oscillators preserve charge and tie the z-slot to
// (energy - es)/2, z^{alpha_0} then shifts z by sign*charge and Q moves the
// energy by exactly -2k + 1 with k = -sign*charge_i(s). States above
//   e2max = min(es + 2 zwin + 2k, E + 2k - 1)
// before Q can never re-enter the compared region, and the retained final
// energies stop at e2max - 2k + 1 = min(es + 2 zwin + 1, E), which also
// bounds the mode expansion on the left side.
inline CheckResult check_vertex(int n, int E, int zwin = 2) {
    return detail::sweep_states("vertex", n, E, [&](const FockState& s, long& cases,
                                                    std::string& failure) {
        using FV = FockVec<Scalar>;
        int es = s.energy2();
        auto filt = [&](ZGraded<Scalar> v) {
            ZGraded<Scalar> out;
            for (const auto& [zp, vec] : v) {
                FockVec<Scalar> w = filter_energy(vec, 0, E);
                if (!w.is_zero()) out.emplace(zp, w);
            }
            return out;
        };
        for (int i = 1; i <= n; ++i)
            for (int sign : {+1, -1}) {
                int k = -sign * s.charge(i);
                int e2max = std::min(es + 2 * zwin + 2 * k, E + 2 * k - 1);
                int e3max = std::min(es + 2 * zwin + 1, E);
                int cut = std::max({es, e2max, e3max, 0});
                FV w = detail::unit_state_vec(s, cut);
                auto lhs = filt(vertex_lhs(sign, i, w, -zwin, zwin));
                auto rhs = filt(vertex_rhs(sign, i, w, -zwin, zwin));
                ++cases;
                if (!(lhs == rhs) && failure.empty())
                    failure = "vertex identity, color " + std::to_string(i) +
                              (sign > 0 ? ", +" : ", -");
            }
    });
}

} // namespace kpgive
