#include "kpgive/sample.hpp"

#include <random>

namespace kpgive {

namespace {

Mat<Scalar> draw_twisted_level(std::mt19937_64& rng, int n, int level, int max_num,
                               int max_den) {
    std::uniform_int_distribution<long> num(-max_num, max_num);
    std::uniform_int_distribution<long> den(1, max_den);
    for (;;) {
        Mat<Scalar> m = mat_zero<Scalar>(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[i][j] = Scalar(num(rng), den(rng));
        // Project onto the twist class: a_l = (m + (-1)^{l+1} m^t) / 2.
        Mat<Scalar> mt = mat_transpose(m);
        Scalar sg = level % 2 == 1 ? Scalar(1) : Scalar(-1);
        Mat<Scalar> a = mat_zero<Scalar>(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[i][j] = (m[i][j] + sg * mt[i][j]) * Scalar(1, 2);
        if (!mat_is_zero(a)) return a;
    }
}

} // namespace

LoopAlg<Scalar> sample_twisted_algebra(std::uint64_t seed, int dir, const SampleSpec& spec) {
    if (spec.n == 1) {
        // One-color twist kills even levels entirely (a scalar must be
        // antisymmetric), so only odd levels can appear.
        for (int l : spec.levels)
            if (l % 2 == 0)
                throw InconsistentInput("sample_twisted_algebra: even level is empty for n=1");
    }
    std::mt19937_64 rng(seed);
    LoopAlg<Scalar> a;
    a.n = spec.n;
    a.dir = dir;
    for (int l : spec.levels)
        a.terms.push_back({l, draw_twisted_level(rng, spec.n, l, spec.max_num, spec.max_den)});
    require_twisted(a);
    return a;
}

LoopGrp<Scalar> sample_twisted_group(std::uint64_t seed, int factors, int first_dir, bool mixed,
                                     const SampleSpec& spec) {
    LoopGrp<Scalar> g;
    g.n = spec.n;
    for (int f = 0; f < factors; ++f) {
        // Mixed products keep all raising factors to the left of all
        // lowering ones; other orderings have non-polynomial tau series.
        int dir = mixed ? (2 * f < factors ? +1 : -1) : first_dir;
        g.factors.push_back(sample_twisted_algebra(seed * 1000003u + f, dir, spec));
    }
    return g;
}

} // namespace kpgive
