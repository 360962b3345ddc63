#pragma once

// Rank-one cutting-and-stacking constructions: parameters, tower heights,
// the index sets I_{m,n} and their residue histograms.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankone/arith.hpp"

namespace rankone {

/// Cutting and spacer parameters of one stage.
///
/// Spacers are stored sparsely as (column, count) pairs with 1-based,
/// strictly increasing columns and positive counts; every other column
/// carries no spacer. This keeps stages with astronomically many columns
/// (e.g. r_n = 4^{n+1} - 1) representable.
struct StageParams {
    BigInt cuts;
    std::vector<std::pair<BigInt, BigInt>> spacers;

    /// r = counts.size(); zero counts are dropped.
    static StageParams dense(const std::vector<BigInt>& counts);
    static StageParams dense(std::initializer_list<long long> counts);
    static StageParams sparse(BigInt cuts, std::vector<std::pair<BigInt, BigInt>> spacers);

    BigInt spacer_total() const;
    BigInt spacer_at(const BigInt& column) const;

    /// s_{n,1..r}. Throws SizeLimitExceeded when r exceeds `limit`.
    std::vector<BigInt> dense_spacers(std::uint64_t limit = kDefaultSizeLimit) const;

    /// Throws InvalidSpec when r < 2 or a spacer entry is malformed.
    void validate(Stage n) const;

    friend bool operator==(const StageParams&, const StageParams&) = default;
};

/// Finitely queryable source of stage parameters.
class ParameterSource {
public:
    virtual ~ParameterSource() = default;

    virtual StageParams stage(Stage n) const = 0;

    /// Number of queryable stages, when bounded.
    virtual std::optional<Stage> stage_count() const { return std::nullopt; }

    virtual std::string describe() const = 0;
};

class ExplicitTable final : public ParameterSource {
public:
    explicit ExplicitTable(std::vector<StageParams> stages);
    StageParams stage(Stage n) const override;
    std::optional<Stage> stage_count() const override { return stages_.size(); }
    std::string describe() const override;
    const std::vector<StageParams>& stages() const { return stages_; }

private:
    std::vector<StageParams> stages_;
};

/// Stage n uses cycle[n mod cycle.size()].
class PeriodicRule final : public ParameterSource {
public:
    explicit PeriodicRule(std::vector<StageParams> cycle);
    StageParams stage(Stage n) const override;
    std::string describe() const override;
    const std::vector<StageParams>& cycle() const { return cycle_; }

private:
    std::vector<StageParams> cycle_;
};

class FormulaRule final : public ParameterSource {
public:
    FormulaRule(std::string name, std::function<StageParams(Stage)> rule,
                std::optional<Stage> stage_count = std::nullopt);
    StageParams stage(Stage n) const override;
    std::optional<Stage> stage_count() const override { return count_; }
    std::string describe() const override { return name_; }

private:
    std::string name_;
    std::function<StageParams(Stage)> rule_;
    std::optional<Stage> count_;
};

/// A rank-one construction. Cheap to copy; copies share the parameter
/// source and the append-only memo caches (heights, offset and residue
/// histograms), which are safe for concurrent readers.
class RankOneSpec {
public:
    explicit RankOneSpec(std::shared_ptr<const ParameterSource> source);

    static RankOneSpec table(std::vector<StageParams> stages);
    static RankOneSpec periodic(std::vector<StageParams> cycle);
    static RankOneSpec formula(std::string name, std::function<StageParams(Stage)> rule,
                               std::optional<Stage> stage_count = std::nullopt);

    /// Validated parameters of stage n. Throws StageOutOfRange past a table.
    const StageParams& stage(Stage n) const;

    std::optional<Stage> stage_count() const { return source_->stage_count(); }
    std::string describe() const { return source_->describe(); }
    const ParameterSource& source() const { return *source_; }

    struct Cache;
    Cache& cache() const { return *cache_; }

private:
    std::shared_ptr<const ParameterSource> source_;
    std::shared_ptr<Cache> cache_;
};

/// h_n. Memoized.
BigInt height(const RankOneSpec& spec, Stage n);

/// I_{n,n+1}: o_j = j h_n + sum_{0<i<=j} s_{n,i}, 0 <= j < r_n.
std::vector<BigInt> stage_offsets(const RankOneSpec& spec, Stage n,
                                  std::uint64_t size_limit = kDefaultSizeLimit);

/// |I_{m,n}| = prod_{m<=j<n} r_j.
BigInt index_count(const RankOneSpec& spec, Stage m, Stage n);

struct IndexSet {
    Stage m = 0;
    Stage n = 0;
    std::vector<BigInt> indices;  // sorted ascending
};

IndexSet index_set(const RankOneSpec& spec, Stage m, Stage n,
                   std::uint64_t size_limit = kDefaultSizeLimit);

struct ResidueHistogram {
    std::uint64_t k = 0;
    Stage m = 0;
    Stage n = 0;
    std::vector<BigInt> counts;
    BigInt total;
};

/// Histogram of stage_offsets(n) mod k, built from runs of equal spacer
/// prefix sums in O(#spacer runs * k) without enumerating the columns.
std::vector<BigInt> offset_histogram(const RankOneSpec& spec, Stage n, std::uint64_t k);

/// Counts of I_{m,n} mod k by iterated cyclic convolution. Memoized per
/// (m, n, k). Throws InvalidModulus for k < 2 and SizeLimitExceeded for k
/// above kDenseModulusLimit.
ResidueHistogram residue_histogram(const RankOneSpec& spec, Stage m, Stage n, std::uint64_t k);

/// Cyclic convolution of two length-k histograms.
std::vector<BigInt> convolve_mod(const std::vector<BigInt>& a, const std::vector<BigInt>& b);

/// True when every element of stage_offsets(n) is divisible by k.
bool offsets_aligned(const RankOneSpec& spec, Stage n, const BigInt& k);

struct MassReport {
    Stage depth = 0;
    std::vector<Rational> terms;         // (h_{n+1} - r_n h_n) / h_{n+1}, n < depth
    std::vector<Rational> partial_sums;  // partial_sums[i] = terms[0] + ... + terms[i]

    Rational total() const { return partial_sums.empty() ? Rational{0} : partial_sums.back(); }
};

MassReport mass_check(const RankOneSpec& spec, Stage depth);

/// 1 / mu(B_n) = prod_{j<n} r_j, with mu(B_0) = 1.
BigInt base_inverse_measure(const RankOneSpec& spec, Stage n);

/// Unnormalized measure of the stage-n tower: h_n mu(B_n).
Rational tower_mass(const RankOneSpec& spec, Stage n);

}  // namespace rankone
