#pragma once

// Exact measure arithmetic on unions of tower levels, epsilon-containment,
// and the finite-stage approximating maps onto Z/kZ.

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "rankone/core.hpp"

namespace rankone {

/// A union of levels T^i(B_n), 0 <= i < h_n, of one stage-n tower.
///
/// Measures are unnormalized: mu(B_0) = 1, so mu(T^i(B_n)) = 1 / prod_{j<n} r_j.
class LevelSet {
public:
    /// Explicit members; sorted and deduplicated on construction. Throws
    /// InvalidSpec for levels outside [0, h_depth).
    static LevelSet levels(RankOneSpec spec, Stage depth, std::vector<BigInt> members);

    /// { i < h_depth : [i]_k in classes }.
    static LevelSet residue_family(RankOneSpec spec, Stage depth, std::uint64_t k,
                                   std::vector<std::uint64_t> classes);

    /// Every level of the stage-`depth` tower.
    static LevelSet tower(RankOneSpec spec, Stage depth);

    Stage depth() const { return depth_; }
    const RankOneSpec& spec() const { return spec_; }
    bool is_symbolic() const { return std::holds_alternative<Residues>(rep_); }

    BigInt count() const;
    Rational measure() const;
    bool contains(const BigInt& level) const;

    /// Sorted members. Throws SizeLimitExceeded past `limit`.
    std::vector<BigInt> members(std::uint64_t limit = kDefaultSizeLimit) const;

    /// Set modulus and classes of a residue family.
    std::uint64_t residue_modulus() const;
    const std::vector<bool>& residue_classes() const;

private:
    struct Explicit {
        std::vector<BigInt> members;
    };
    struct Residues {
        std::uint64_t k = 0;
        std::vector<bool> classes;
    };

    LevelSet(RankOneSpec spec, Stage depth, std::variant<Explicit, Residues> rep);

    RankOneSpec spec_;
    Stage depth_;
    BigInt height_;
    std::variant<Explicit, Residues> rep_;
};

/// The same set at depth `to`: level i becomes { o + i : o in I_{depth,to} }.
/// Symbolic families are materialized.
LevelSet refine(const LevelSet& a, Stage to, std::uint64_t size_limit = kDefaultSizeLimit);

/// mu(A \ B) / mu(A), after refining both to the deeper stage. Throws
/// EmptySet when A is empty.
Rational containment_fraction(const LevelSet& a, const LevelSet& b,
                              std::uint64_t size_limit = kDefaultSizeLimit);

/// A is eps-contained in B: containment_fraction(A, B) < eps.
bool is_eps_contained(const LevelSet& a, const LevelSet& b, const Rational& eps,
                      std::uint64_t size_limit = kDefaultSizeLimit);

/// { i + t : i in A, 0 <= i + t < h_depth } (T^t applied level-wise where
/// the image stays in the tower).
LevelSet shift(const LevelSet& a, long long t, std::uint64_t size_limit = kDefaultSizeLimit);

/// Finite-stage approximation pi_alpha of a factor map onto Z/kZ. Level i
/// of the stage-`stage` tower is sent to [[i]_k - offset]_k.
struct ApproximatingMap {
    std::uint64_t k = 0;
    std::size_t alpha = 0;
    Stage stage = 0;           // N_alpha
    Stage next_stage = 0;      // N_{alpha+1}
    std::uint64_t step = 0;    // j_alpha: majority class of I_{N_alpha, N_{alpha+1}} mod k
    std::uint64_t offset = 0;  // J_alpha = sum_{beta<alpha} j_beta mod k
    Rational eta;              // eta_alpha
    Rational mass_fraction;    // tower_mass(N_alpha) / tower_mass(depth)
    /// mu{x in dom(phi_alpha) : phi_{alpha+1}(x) != [phi_alpha(x) + j_alpha]_k}
    /// divided by the mass of the deepest computed tower.
    Rational defect;
    /// fibers[c] = pi_alpha^{-1}(c), a partition of the tower.
    std::vector<LevelSet> fibers;

    std::uint64_t project(const BigInt& level) const;
};

struct ApproximationSchedule {
    Stage depth = 0;  // deepest stage any N_alpha may use
    Stage start = 0;  // lower bound for N_0
    /// eta_alpha; default 1 / 2^{alpha+2}.
    std::function<Rational(std::size_t)> eta;
    /// Required tower_mass(N_alpha) / tower_mass(depth); default 1 - 1/2^{alpha+1}.
    std::function<Rational(std::size_t)> mass_floor;
};

ApproximationSchedule default_schedule(Stage depth, Stage start = 0);

/// Picks N_0 < N_1 < ... < N_{alpha_max} <= depth, each the least stage past
/// its predecessor whose windows N <= m <= n <= depth have discrepancy below
/// eta_alpha and whose tower meets the mass floor, and returns the maps
/// alpha = 0 .. alpha_max - 1. Throws CriterionUnmetAtDepth when no such
/// stage exists in the budget; that is a finite-depth unknown, not a
/// refutation.
std::vector<ApproximatingMap> build_approximating_maps(const RankOneSpec& spec, std::uint64_t k,
                                                       std::size_t alpha_max,
                                                       const ApproximationSchedule& schedule);

/// Fraction of non-top levels i < h - 1 whose fiber index does not advance
/// by one from level i to i + 1. Zero for every map built above; levels
/// outside every fiber count as defects.
Rational equivariance_defect(const ApproximatingMap& map, std::uint64_t size_limit = kDefaultSizeLimit);

}  // namespace rankone
