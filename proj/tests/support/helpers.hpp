#pragma once

// Brute-force references and random fixtures shared by the test binaries.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "rankone/core.hpp"
#include "rankone/measure.hpp"

namespace rankone::testing {

/// Deterministic generator; every property test seeds its own.
using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

/// Random periodic-free table: `stages` stages, r in [2, r_max], spacers in [0, s_max].
inline RankOneSpec random_table(Rng& rng, std::size_t stages, std::uint64_t r_max, std::uint64_t s_max) {
    std::vector<StageParams> table;
    for (std::size_t n = 0; n < stages; ++n) {
        std::vector<BigInt> counts(uniform(rng, 2, r_max));
        for (auto& c : counts) c = uniform(rng, 0, s_max);
        table.push_back(StageParams::dense(counts));
    }
    return RankOneSpec::table(std::move(table));
}

inline std::vector<BigInt> explicit_histogram(const std::vector<BigInt>& indices, std::uint64_t k) {
    std::vector<BigInt> counts(k, BigInt(0));
    for (const auto& i : indices) counts[static_cast<std::size_t>(i % k)] += 1;
    return counts;
}

/// min over all 2^k subsets D of |{i < h : [i]_k in D} xor I| / |I|.
inline Rational brute_eps_star(const std::vector<BigInt>& indices, std::uint64_t h, std::uint64_t k) {
    std::vector<char> in(h, 0);
    for (const auto& i : indices) in[i.convert_to<std::size_t>()] = 1;
    std::uint64_t best = UINT64_MAX;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        std::uint64_t sym = 0;
        for (std::uint64_t i = 0; i < h; ++i) {
            const bool in_d = (mask >> (i % k)) & 1;
            if (in_d != (in[i] != 0)) ++sym;
        }
        best = std::min(best, sym);
    }
    return Rational(BigInt(best), BigInt(indices.size()));
}

/// Same minimum over all 2^k subsets, scored from per-class counts: `in`
/// counts I by class, `all` counts the levels below h by class.
inline Rational brute_eps_star_by_class(const std::vector<BigInt>& in, const std::vector<BigInt>& all,
                                        const BigInt& size) {
    const std::size_t k = in.size();
    BigInt best = -1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        BigInt sym = 0;
        for (std::size_t c = 0; c < k; ++c) sym += ((mask >> c) & 1) ? all[c] - in[c] : in[c];
        if (best < 0 || sym < best) best = sym;
    }
    return Rational(best, size);
}

/// Each level of the stage-`depth` tower kept with probability 1/`one_in`.
inline LevelSet random_level_set(Rng& rng, const RankOneSpec& spec, Stage depth, std::uint64_t one_in) {
    const auto h = height(spec, depth).convert_to<std::uint64_t>();
    std::vector<BigInt> members;
    for (std::uint64_t i = 0; i < h; ++i) {
        if (uniform(rng, 1, one_in) == 1) members.emplace_back(i);
    }
    return LevelSet::levels(spec, depth, std::move(members));
}

inline Rational brute_delta(const std::vector<BigInt>& indices, std::uint64_t k) {
    const auto counts = explicit_histogram(indices, k);
    const BigInt best = *std::max_element(counts.begin(), counts.end());
    return Rational(BigInt(indices.size()) - best, BigInt(indices.size()));
}

}  // namespace rankone::testing
