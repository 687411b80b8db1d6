#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kpgive/poly.hpp"

namespace kpgive {

// Basis state of the n-color charged fermionic Fock space, encoded by its
// deviation from the vacuum: per color, the occupied modes above the Dirac
// sea (particles) and the vacated modes below it (holes). Modes are
// half-integers stored doubled, so every stored value is odd; particles are
// positive, holes negative, both kept ascending.
struct FockState {
    int n = 1;
    std::vector<std::vector<int>> part;
    std::vector<std::vector<int>> hole;

    static FockState vacuum(int n_colors) {
        FockState s;
        s.n = n_colors;
        s.part.resize(n_colors);
        s.hole.resize(n_colors);
        return s;
    }

    // Doubled energy: twice the sum of |mode| over all excitations.
    int energy2() const {
        int e = 0;
        for (const auto& v : part)
            for (int m2 : v) e += m2;
        for (const auto& v : hole)
            for (int m2 : v) e -= m2;
        return e;
    }

    int charge(int j) const {
        return static_cast<int>(part[j - 1].size()) - static_cast<int>(hole[j - 1].size());
    }

    std::vector<int> charges() const {
        std::vector<int> c(n);
        for (int j = 1; j <= n; ++j) c[j - 1] = charge(j);
        return c;
    }

    bool is_vacuum() const {
        for (const auto& v : part)
            if (!v.empty()) return false;
        for (const auto& v : hole)
            if (!v.empty()) return false;
        return true;
    }

    // Wire format: per color "p[...]" and/or "h[...]" listing modes as
    // halves, "-" when the color is unexcited, colors joined by ";".
    std::string dump() const {
        auto half = [](int m2) { return std::to_string(m2) + "/2"; };
        std::string out;
        for (int j = 1; j <= n; ++j) {
            if (j > 1) out += ";";
            out += "c" + std::to_string(j) + ":";
            std::string sec;
            if (!part[j - 1].empty()) {
                sec += "p[";
                for (size_t i = 0; i < part[j - 1].size(); ++i)
                    sec += (i ? "," : "") + half(part[j - 1][i]);
                sec += "]";
            }
            if (!hole[j - 1].empty()) {
                if (!sec.empty()) sec += ",";
                sec += "h[";
                for (size_t i = 0; i < hole[j - 1].size(); ++i)
                    sec += (i ? "," : "") + half(hole[j - 1][i]);
                sec += "]";
            }
            out += sec.empty() ? "-" : sec;
        }
        return out;
    }

    auto operator<=>(const FockState&) const = default;
};

// Global doubled index of mode m2 of color j: interleaves the n colors so
// that larger values sit earlier in the semi-infinite wedge word.
inline long g2_index(int n, int j, int m2) {
    return static_cast<long>(n) * (m2 - 1) + 2 * j - 1;
}

// Number of present wedge factors strictly above slot (j0, m20): present
// particles plus vacuum levels not opened as holes. Finite because only
// finitely many negative levels exceed any fixed index.
inline int count_above(const FockState& s, int j0, int m20) {
    long G = g2_index(s.n, j0, m20);
    int cnt = 0;
    for (int j = 1; j <= s.n; ++j) {
        for (int m2 : s.part[j - 1])
            if (g2_index(s.n, j, m2) > G) ++cnt;
        // Vacuum levels of color j: odd m2 < 0 with g2 > G, i.e.
        // m2 > (G + 1 - 2j)/n + 1; least such odd integer:
        long num = G + 1 - 2 * j + s.n;
        long m2min = detail::floor_div(num, s.n) + 1;
        if (m2min % 2 == 0) ++m2min;
        if (m2min <= -1) {
            cnt += static_cast<int>((-1 - m2min) / 2 + 1);
            for (int h2 : s.hole[j - 1])
                if (h2 >= m2min) --cnt;
        }
    }
    return cnt;
}

namespace detail {

inline bool sorted_insert(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) return false;
    v.insert(it, x);
    return true;
}

inline bool sorted_remove(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) return false;
    v.erase(it);
    return true;
}

} // namespace detail

// One fermion mode operator psi^{lambda (j)}_{k} with lambda = +1 (wedge by
// the basis vector at slot -k) or -1 (contraction at slot k); k is passed
// doubled as k2. Mutates s and returns the fermionic sign, or 0 when the
// state is annihilated. Doubled energy changes by -k2, charge j by lambda.
inline int apply_psi_state(int lambda, int j, int k2, FockState& s) {
    int m2 = lambda > 0 ? -k2 : k2;
    int sign = (count_above(s, j, m2) % 2 == 0) ? 1 : -1;
    auto& part = s.part[j - 1];
    auto& hole = s.hole[j - 1];
    if (lambda > 0) {
        bool ok = m2 > 0 ? detail::sorted_insert(part, m2) : detail::sorted_remove(hole, m2);
        if (!ok) return 0;
    } else {
        bool ok = m2 > 0 ? detail::sorted_remove(part, m2) : detail::sorted_insert(hole, m2);
        if (!ok) return 0;
    }
    return sign;
}

// Linear combination of basis states with coefficients in C (a ring or a
// truncated polynomial over one). States above the doubled energy cutoff
// are discarded; the cutoff is the trust region of every consumer.
template <class C>
struct FockVec {
    int n = 1;
    int cut = 0;
    std::map<FockState, C> t;

    static FockVec vacuum_vec(int n_colors, int cutoff, const C& unit) {
        FockVec v;
        v.n = n_colors;
        v.cut = cutoff;
        v.t.emplace(FockState::vacuum(n_colors), unit);
        return v;
    }

    bool is_zero() const { return t.empty(); }

    void add(const FockState& s, const C& c) {
        if (c.is_zero() || s.energy2() > cut) return;
        auto [it, fresh] = t.emplace(s, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) t.erase(it);
        }
    }

    const C* find(const FockState& s) const {
        auto it = t.find(s);
        return it == t.end() ? nullptr : &it->second;
    }

    C coeff_or(const FockState& s, const C& zero) const {
        const C* p = find(s);
        return p ? *p : zero;
    }

    FockVec& operator+=(const FockVec& o) {
        for (const auto& [s, c] : o.t) add(s, c);
        return *this;
    }
    FockVec& operator-=(const FockVec& o) {
        for (const auto& [s, c] : o.t) add(s, -c);
        return *this;
    }
    friend FockVec operator+(FockVec a, const FockVec& b) { return a += b; }
    friend FockVec operator-(FockVec a, const FockVec& b) { return a -= b; }

    template <class S>
    FockVec& scale(const S& f) {
        for (auto it = t.begin(); it != t.end();) {
            it->second = it->second * f;
            if (it->second.is_zero()) it = t.erase(it);
            else ++it;
        }
        return *this;
    }

    friend bool operator==(const FockVec& a, const FockVec& b) {
        return a.n == b.n && a.t == b.t;
    }
};

template <class C>
FockVec<C> apply_psi(int lambda, int j, int k2, const FockVec<C>& v) {
    FockVec<C> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t) {
        FockState ns = s;
        int sg = apply_psi_state(lambda, j, k2, ns);
        if (sg == 0) continue;
        r.add(ns, sg > 0 ? c : -c);
    }
    return r;
}

namespace detail {

struct PsiOp {
    int lambda;  // +1 wedge, -1 contraction
    int color;
    int k2;      // doubled mode index of the operator
};

// Evaluate a product of psi operators (leftmost first) on the vacuum.
// Returns the resulting state and sign; sign 0 means annihilation.
inline std::pair<FockState, int> eval_psi_word(int n, const std::vector<PsiOp>& word) {
    FockState s = FockState::vacuum(n);
    int sign = 1;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        int sg = apply_psi_state(it->lambda, it->color, it->k2, s);
        if (sg == 0) return {s, 0};
        sign *= sg;
    }
    return {s, sign};
}

} // namespace detail

// Vertex translation operator Q_i (e = +1) or its inverse (e = -1) on one
// basis state. Realized by rewriting the state as a psi word on the vacuum,
// commuting Q through it (color-i modes shift by one slot, every other-color
// factor contributes a minus sign), absorbing Q into the vacuum as one extra
// psi factor, and re-evaluating. Never annihilates.
inline std::pair<FockState, int> apply_Q_state(int i, int e, const FockState& s) {
    std::vector<detail::PsiOp> word;
    for (int j = 1; j <= s.n; ++j) {
        for (int m2 : s.part[j - 1]) word.push_back({+1, j, -m2});
        for (int h2 : s.hole[j - 1]) word.push_back({-1, j, h2});
    }
    auto [chk, sigma_w] = detail::eval_psi_word(s.n, word);
    if (sigma_w == 0 || !(chk == s))
        throw StructuralError("apply_Q_state: state word failed to replay");

    int flips = 0;
    for (auto& op : word) {
        if (op.color != i) { ++flips; continue; }
        // Q_i psi^{+(i)}_k = psi^{+(i)}_{k-1} Q_i and
        // Q_i psi^{-(i)}_k = psi^{-(i)}_{k+1} Q_i; inverted for e = -1.
        op.k2 += (op.lambda > 0 ? -2 : 2) * e;
    }
    word.push_back({e > 0 ? +1 : -1, i, -1});  // Q_i^{+-1}|0> = psi^{+-(i)}_{-1/2}|0>

    auto [ns, sg] = detail::eval_psi_word(s.n, word);
    if (sg == 0) throw StructuralError("apply_Q_state: translation annihilated a state");
    int total = sigma_w * sg * (flips % 2 == 0 ? 1 : -1);
    return {ns, total};
}

template <class C>
FockVec<C> apply_Q(int i, int e, const FockVec<C>& v) {
    FockVec<C> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t) {
        auto [ns, sg] = apply_Q_state(i, e, s);
        r.add(ns, sg > 0 ? c : -c);
    }
    return r;
}

// Charged vacuum |c_1 .. c_n> = Q_1^{c_1} ... Q_n^{c_n} |0> as a canonical
// state with its sign. Its doubled energy is sum c_j^2.
inline std::pair<FockState, int> charged_vacuum(int n, const std::vector<int>& c) {
    if (static_cast<int>(c.size()) != n)
        throw StructuralError("charged_vacuum: charge vector length mismatch");
    FockState s = FockState::vacuum(n);
    int sign = 1;
    for (int i = n; i >= 1; --i) {
        int e = c[i - 1] >= 0 ? 1 : -1;
        for (int k = 0; k < std::abs(c[i - 1]); ++k) {
            auto [ns, sg] = apply_Q_state(i, e, s);
            s = ns;
            sign *= sg;
        }
    }
    return {s, sign};
}

// Color-pair oscillator mode alpha^{(ci cj)}_k, the normally ordered sum
// over a+b=k of psi^{+(ci)}_a psi^{-(cj)}_b. Candidate enumeration is
// exact: a nonzero term either contracts an existing particle of color cj
// or fills a slot adjacent to an existing hole of color ci, plus finitely
// many vacuum terms when k < 0. Doubled energy drops by exactly 2k.
template <class C>
FockVec<C> apply_alpha(int ci, int cj, int k, const FockVec<C>& v) {
    FockVec<C> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t) {
        std::set<int> cand;
        for (int b2 : s.part[cj - 1]) cand.insert(b2);
        for (int h2 : s.hole[ci - 1]) cand.insert(h2 + 2 * k);
        for (int b2 = 2 * k + 1; b2 <= -1; b2 += 2) cand.insert(b2);
        for (int b2 : cand) {
            if (b2 == 0) continue;
            FockState ns = s;
            int sg1, sg2, extra;
            if (b2 > 0) {
                // :psi^+ psi^-: acts as written, contraction first.
                sg1 = apply_psi_state(-1, cj, b2, ns);
                if (sg1 == 0) continue;
                sg2 = apply_psi_state(+1, ci, -(b2 - 2 * k), ns);
                if (sg2 == 0) continue;
                extra = 1;
            } else {
                // Normal ordering swaps the pair and flips the sign.
                sg1 = apply_psi_state(+1, ci, -(b2 - 2 * k), ns);
                if (sg1 == 0) continue;
                sg2 = apply_psi_state(-1, cj, b2, ns);
                if (sg2 == 0) continue;
                extra = -1;
            }
            r.add(ns, (sg1 * sg2 * extra) > 0 ? c : -c);
        }
    }
    return r;
}

template <class C>
C extract_coefficient(const FockVec<C>& v, const FockState& s, const C& zero) {
    return v.coeff_or(s, zero);
}

// Keep only states whose doubled energy lies in [lo, hi].
template <class C>
FockVec<C> filter_energy(const FockVec<C>& v, int lo, int hi) {
    FockVec<C> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t) {
        int e = s.energy2();
        if (e >= lo && e <= hi) r.t.emplace(s, c);
    }
    return r;
}

template <class C, class Pred>
FockVec<C> filter_states(const FockVec<C>& v, Pred keep) {
    FockVec<C> r;
    r.n = v.n;
    r.cut = v.cut;
    for (const auto& [s, c] : v.t)
        if (keep(s)) r.t.emplace(s, c);
    return r;
}

// All basis states with doubled energy <= cut, every charge sector.
// Intended for exhaustive kernel checks at small cutoffs.
inline std::vector<FockState> enumerate_states(int n, int cut) {
    // Per color: all (particles, holes) fragments of doubled energy <= cut,
    // built by deciding each odd level once (skip / particle / hole / both).
    struct Frag {
        std::vector<int> part, hole;
        int e2;
    };
    std::vector<Frag> frags;
    std::vector<int> pick_p, pick_h;
    auto emit = [&](int used) {
        Frag f;
        f.part = pick_p;
        f.hole = pick_h;
        std::sort(f.hole.begin(), f.hole.end());
        f.e2 = used;
        frags.push_back(std::move(f));
    };
    auto rec = [&](auto&& self, int m2, int rem, int used) -> void {
        if (m2 > rem) {
            emit(used);
            return;
        }
        self(self, m2 + 2, rem, used);
        pick_p.push_back(m2);
        self(self, m2 + 2, rem - m2, used + m2);
        pick_p.pop_back();
        pick_h.push_back(-m2);
        self(self, m2 + 2, rem - m2, used + m2);
        if (2 * m2 <= rem) {
            pick_p.push_back(m2);
            self(self, m2 + 2, rem - 2 * m2, used + 2 * m2);
            pick_p.pop_back();
        }
        pick_h.pop_back();
    };
    rec(rec, 1, cut, 0);

    std::vector<FockState> out;
    std::vector<size_t> choice(n, 0);
    auto combine = [&](auto&& self, int color, int rem) -> void {
        if (color == n) {
            FockState s = FockState::vacuum(n);
            for (int j = 0; j < n; ++j) {
                s.part[j] = frags[choice[j]].part;
                s.hole[j] = frags[choice[j]].hole;
            }
            out.push_back(std::move(s));
            return;
        }
        for (size_t i = 0; i < frags.size(); ++i) {
            if (frags[i].e2 > rem) continue;
            choice[color] = i;
            self(self, color + 1, rem - frags[i].e2);
        }
    };
    combine(combine, 0, cut);
    return out;
}

} // namespace kpgive
