#pragma once

// Finite-depth checkers for cyclic factors, odometer factors, total
// ergodicity and isomorphism to an odometer. Verdicts are certificates for
// the windows examined and never claims about the infinite construction.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankone/core.hpp"
#include "rankone/odometers.hpp"

namespace rankone {

enum class VerdictStatus { PassAtDepth, FailWitness, UnknownAtDepth };

/// "PASS_AT_DEPTH", "FAIL_WITNESS", "UNKNOWN_AT_DEPTH".
std::string to_string(VerdictStatus s);

/// delta = min_j |{i in I_{m,n} : [i]_k != j}| / |I_{m,n}|, best_j the
/// smallest minimizer.
struct CyclicDiscrepancy {
    Stage m = 0;
    Stage n = 0;
    BigInt k;
    BigInt best_j;
    Rational delta;
    std::string method;  // "histogram", "aligned", "aligned_distinct", "enumerated"
};

/// Exact for every k. Moduli above the dense limit are handled when all
/// stages past some a have offsets divisible by k and I_{m,a} is small or
/// spread below k; otherwise SizeLimitExceeded.
CyclicDiscrepancy cyclic_discrepancy(const RankOneSpec& spec, Stage m, Stage n, const BigInt& k,
                                     std::uint64_t size_limit = kDefaultSizeLimit);

/// eps_star = min_D |{i < h_m : [i]_k in D} xor I_{l,m}| / |I_{l,m}|.
struct SymmetricDifferenceFit {
    Stage l = 0;
    Stage m = 0;
    BigInt k;
    /// Sorted classes of the majority-rule minimizer; empty optional when
    /// there are too many to list.
    std::optional<std::vector<BigInt>> best_d;
    BigInt d_size;
    Rational eps_star;
    std::string method;  // "histogram", "k_ge_height", "aligned_blocks"
};

SymmetricDifferenceFit symmetric_difference_fit(const RankOneSpec& spec, Stage l, Stage m, const BigInt& k,
                                                std::uint64_t size_limit = kDefaultSizeLimit);

struct CriterionVerdict {
    VerdictStatus status = VerdictStatus::UnknownAtDepth;
    std::string criterion;
    Stage depth = 0;
    bool zero_evidence = false;
    std::vector<CyclicDiscrepancy> windows;
    std::vector<SymmetricDifferenceFit> fits;
    /// Start stage N -> max delta over N <= m <= n <= depth.
    std::map<Stage, Rational> profile;
    /// Per-probe sub-verdicts, in probe order.
    std::vector<CriterionVerdict> parts;
    std::vector<std::string> notes;

    bool passed() const { return status == VerdictStatus::PassAtDepth; }
};

/// PASS_AT_DEPTH iff delta(m,n,k) < eta for all start <= m <= n <= depth.
/// Otherwise UNKNOWN_AT_DEPTH: N is existential, so a window cannot refute.
CriterionVerdict check_cyclic_factor(const RankOneSpec& spec, const BigInt& k, const Rational& eta, Stage start,
                                     Stage depth);

enum class SummabilityReading {
    OffClassOverWindow,  // |{i in I_{q_n,q_{n+1}} : i !== 0}| / |I_{q_n,q_{n+1}}|
    LiteralZeroClass,    // |{i in I_{q_n,q_{n+1}} : i == 0}| / |I_{q_n,q_n}|, as printed
};

std::string to_string(SummabilityReading r);

struct SummabilityProfile {
    BigInt k;
    SummabilityReading reading = SummabilityReading::OffClassOverWindow;
    std::vector<Stage> q;
    std::vector<Rational> terms;
    std::vector<Rational> partial_sums;
};

SummabilityProfile summability_profile(const RankOneSpec& spec, const BigInt& k, const std::vector<Stage>& q,
                                       SummabilityReading reading = SummabilityReading::OffClassOverWindow);

struct ErgodicityProbeRow {
    std::uint64_t k = 0;
    CriterionVerdict verdict;
    /// min over start <= m < n <= depth of delta(m,n,k); large values are
    /// evidence of total ergodicity, nothing more.
    Rational min_window_delta;
    CyclicDiscrepancy min_window;
};

std::vector<ErgodicityProbeRow> total_ergodicity_probe(const RankOneSpec& spec, std::uint64_t k_max,
                                                       const Rational& eta, Stage start, Stage depth);

/// Conjunction of check_cyclic_factor over the probes. Throws ProbeNotInK
/// for a probe outside the divisor closure of `target`.
CriterionVerdict check_odometer_factor(const RankOneSpec& spec, const Supernatural& target,
                                       const std::vector<BigInt>& probes, const Rational& eta, Stage start,
                                       Stage depth);

struct IsoScheduleRow {
    Stage l = 0;
    Rational eps;
    std::vector<BigInt> k_candidates;
    Stage start = 0;
    Stage depth = 0;
};

/// Cyclic-factor half of the isomorphism check.
struct FactorProbes {
    std::vector<BigInt> probes;
    Rational eta;
    Stage start = 0;
    Stage depth = 0;
};

/// PASS_AT_DEPTH iff every factor probe passes and every row has a
/// candidate k with eps_star(l, m, k) < eps for all max(start, l) <= m <= depth.
/// The first such candidate is the row's witness.
CriterionVerdict check_isomorphic_to_odometer(const RankOneSpec& spec, const Supernatural& target,
                                              const std::vector<IsoScheduleRow>& schedule,
                                              const FactorProbes& factor);

struct SearchOptions {
    Stage l_max = 0;
    std::vector<Rational> eps;
    std::uint64_t k_budget = 64;
    Rational eta{1, 10};
    Stage start = 1;
    Stage depth = 8;
};

struct SearchResult {
    CriterionVerdict verdict;
    /// Divisor closure of the witnesses, truncated; empty when a row failed.
    std::optional<Supernatural> candidate;
    /// (l, eps) -> witnessing k, in search order.
    std::vector<std::pair<std::pair<Stage, Rational>, BigInt>> witnesses;
};

/// For each l <= l_max and eps, the least 2 <= k <= k_budget that passes
/// the cyclic-factor windows at eta and fits I_{l,m} below eps for
/// max(start, l) <= m <= depth.
SearchResult search_some_odometer(const RankOneSpec& spec, const SearchOptions& options);

}  // namespace rankone
