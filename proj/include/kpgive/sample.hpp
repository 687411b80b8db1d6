#pragma once

#include <cstdint>
#include <vector>

#include "kpgive/loop.hpp"

namespace kpgive {

// Shape of a randomly drawn loop element. Entries are rationals with
// numerators in [-max_num, max_num] and denominators in [1, max_den].
struct SampleSpec {
    int n = 2;
    std::vector<int> levels = {1};
    int max_num = 3;
    int max_den = 2;
};

// Deterministic in the seed: one seed, one element. Each level matrix is
// drawn dense and then projected onto the twisted symmetry class, so the
// result always satisfies the twist law and is never the zero element.
LoopAlg<Scalar> sample_twisted_algebra(std::uint64_t seed, int dir, const SampleSpec& spec);

// Product of `factors` exponentials. All factors use first_dir unless mixed
// is true, in which case the first half raise and the rest lower (the only
// ordering whose tau series stay polynomial).
LoopGrp<Scalar> sample_twisted_group(std::uint64_t seed, int factors, int first_dir, bool mixed,
                                     const SampleSpec& spec);

} // namespace kpgive
