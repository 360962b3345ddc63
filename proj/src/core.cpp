#include "rankone/core.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <tuple>

#include "rankone/error.hpp"

namespace rankone {

// ---------------------------------------------------------------------------
// StageParams

StageParams StageParams::dense(const std::vector<BigInt>& counts) {
    StageParams p;
    p.cuts = BigInt(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != 0) p.spacers.emplace_back(BigInt(i + 1), counts[i]);
    }
    return p;
}

StageParams StageParams::dense(std::initializer_list<long long> counts) {
    std::vector<BigInt> v;
    v.reserve(counts.size());
    for (long long c : counts) v.emplace_back(c);
    return dense(v);
}

StageParams StageParams::sparse(BigInt cuts, std::vector<std::pair<BigInt, BigInt>> spacers) {
    StageParams p;
    p.cuts = std::move(cuts);
    std::sort(spacers.begin(), spacers.end());
    for (auto& [col, count] : spacers) {
        if (count == 0) continue;
        if (!p.spacers.empty() && p.spacers.back().first == col) {
            throw Error(ErrorKind::InvalidSpec, "duplicate spacer column " + col.str());
        }
        p.spacers.emplace_back(std::move(col), std::move(count));
    }
    return p;
}

BigInt StageParams::spacer_total() const {
    BigInt total = 0;
    for (const auto& [col, count] : spacers) total += count;
    return total;
}

BigInt StageParams::spacer_at(const BigInt& column) const {
    auto it = std::lower_bound(spacers.begin(), spacers.end(), column,
                               [](const auto& entry, const BigInt& c) { return entry.first < c; });
    if (it != spacers.end() && it->first == column) return it->second;
    return 0;
}

std::vector<BigInt> StageParams::dense_spacers(std::uint64_t limit) const {
    if (cuts > limit) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    "stage has " + cuts.str() + " columns, limit " + std::to_string(limit));
    }
    std::vector<BigInt> out(cuts.convert_to<std::size_t>(), BigInt(0));
    for (const auto& [col, count] : spacers) out[(col - 1).convert_to<std::size_t>()] = count;
    return out;
}

void StageParams::validate(Stage n) const {
    auto where = " at stage " + std::to_string(n);
    if (cuts < 2) throw Error(ErrorKind::InvalidSpec, "cutting parameter must be >= 2" + where);
    for (std::size_t i = 0; i < spacers.size(); ++i) {
        const auto& [col, count] = spacers[i];
        if (col < 1 || col > cuts) {
            throw Error(ErrorKind::InvalidSpec, "spacer column " + col.str() + " outside [1, r]" + where);
        }
        if (count < 0) throw Error(ErrorKind::InvalidSpec, "negative spacer count" + where);
        if (i > 0 && spacers[i - 1].first >= col) {
            throw Error(ErrorKind::InvalidSpec, "spacer columns not strictly increasing" + where);
        }
    }
}

// ---------------------------------------------------------------------------
// Sources

namespace {

std::string describe_stage(const StageParams& p) {
    std::string s = "r=" + p.cuts.str();
    if (!p.spacers.empty()) {
        s += " s={";
        for (std::size_t i = 0; i < p.spacers.size(); ++i) {
            if (i) s += ",";
            s += p.spacers[i].first.str() + ":" + p.spacers[i].second.str();
        }
        s += "}";
    }
    return s;
}

}  // namespace

ExplicitTable::ExplicitTable(std::vector<StageParams> stages) : stages_(std::move(stages)) {}

StageParams ExplicitTable::stage(Stage n) const {
    if (n >= stages_.size()) {
        throw Error(ErrorKind::StageOutOfRange,
                    "stage " + std::to_string(n) + " beyond explicit table of " +
                        std::to_string(stages_.size()) + " stages");
    }
    return stages_[n];
}

std::string ExplicitTable::describe() const {
    std::string s = "table[";
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        if (i) s += "; ";
        s += describe_stage(stages_[i]);
    }
    return s + "]";
}

PeriodicRule::PeriodicRule(std::vector<StageParams> cycle) : cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw Error(ErrorKind::InvalidSpec, "periodic rule needs at least one stage");
}

StageParams PeriodicRule::stage(Stage n) const { return cycle_[n % cycle_.size()]; }

std::string PeriodicRule::describe() const {
    std::string s = "periodic[";
    for (std::size_t i = 0; i < cycle_.size(); ++i) {
        if (i) s += "; ";
        s += describe_stage(cycle_[i]);
    }
    return s + "]";
}

FormulaRule::FormulaRule(std::string name, std::function<StageParams(Stage)> rule,
                         std::optional<Stage> stage_count)
    : name_(std::move(name)), rule_(std::move(rule)), count_(stage_count) {}

StageParams FormulaRule::stage(Stage n) const {
    if (count_ && n >= *count_) {
        throw Error(ErrorKind::StageOutOfRange,
                    "stage " + std::to_string(n) + " beyond " + name_ + " depth " + std::to_string(*count_));
    }
    return rule_(n);
}

// ---------------------------------------------------------------------------
// RankOneSpec and its caches

struct RankOneSpec::Cache {
    std::shared_mutex mutex;
    std::deque<StageParams> stages;  // deque: references stay valid on append
    std::vector<BigInt> heights{BigInt(1)};
    std::map<std::pair<Stage, std::uint64_t>, std::vector<BigInt>> offsets;
    std::map<std::tuple<Stage, Stage, std::uint64_t>, ResidueHistogram> histograms;
};

RankOneSpec::RankOneSpec(std::shared_ptr<const ParameterSource> source)
    : source_(std::move(source)), cache_(std::make_shared<Cache>()) {
    if (!source_) throw Error(ErrorKind::InvalidSpec, "null parameter source");
}

RankOneSpec RankOneSpec::table(std::vector<StageParams> stages) {
    return RankOneSpec(std::make_shared<ExplicitTable>(std::move(stages)));
}

RankOneSpec RankOneSpec::periodic(std::vector<StageParams> cycle) {
    return RankOneSpec(std::make_shared<PeriodicRule>(std::move(cycle)));
}

RankOneSpec RankOneSpec::formula(std::string name, std::function<StageParams(Stage)> rule,
                                 std::optional<Stage> stage_count) {
    return RankOneSpec(std::make_shared<FormulaRule>(std::move(name), std::move(rule), stage_count));
}

const StageParams& RankOneSpec::stage(Stage n) const {
    auto& c = *cache_;
    {
        std::shared_lock lock(c.mutex);
        if (n < c.stages.size()) return c.stages[n];
    }
    Stage next;
    {
        std::shared_lock lock(c.mutex);
        next = c.stages.size();
    }
    // The source is queried without holding the lock: formula rules may be slow.
    for (Stage i = next; i <= n; ++i) {
        StageParams p = source_->stage(i);
        p.validate(i);
        std::unique_lock lock(c.mutex);
        if (c.stages.size() == i) c.stages.push_back(std::move(p));
    }
    std::shared_lock lock(c.mutex);
    return c.stages[n];
}

// ---------------------------------------------------------------------------
// Heights, offsets, index sets

BigInt height(const RankOneSpec& spec, Stage n) {
    auto& c = spec.cache();
    Stage known;
    BigInt h;
    {
        std::shared_lock lock(c.mutex);
        if (n < c.heights.size()) return c.heights[n];
        known = c.heights.size() - 1;
        h = c.heights.back();
    }
    for (Stage i = known; i < n; ++i) {
        const auto& p = spec.stage(i);
        h = p.cuts * h + p.spacer_total();
        std::unique_lock lock(c.mutex);
        if (c.heights.size() == i + 1) c.heights.push_back(h);
    }
    return h;
}

std::vector<BigInt> stage_offsets(const RankOneSpec& spec, Stage n, std::uint64_t size_limit) {
    const auto& p = spec.stage(n);
    if (p.cuts > size_limit) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    "stage " + std::to_string(n) + " has " + p.cuts.str() + " offsets");
    }
    const BigInt h = height(spec, n);
    const auto r = p.cuts.convert_to<std::size_t>();
    std::vector<BigInt> out;
    out.reserve(r);
    BigInt prefix = 0;
    auto next_spacer = p.spacers.begin();
    for (std::size_t j = 0; j < r; ++j) {
        // o_j includes s_{n,i} for every column i <= j.
        while (next_spacer != p.spacers.end() && next_spacer->first <= j) {
            prefix += next_spacer->second;
            ++next_spacer;
        }
        out.push_back(BigInt(j) * h + prefix);
    }
    return out;
}

BigInt index_count(const RankOneSpec& spec, Stage m, Stage n) {
    if (n < m) throw Error(ErrorKind::InvalidSpec, "index set needs n >= m");
    BigInt count = 1;
    for (Stage j = m; j < n; ++j) count *= spec.stage(j).cuts;
    return count;
}

IndexSet index_set(const RankOneSpec& spec, Stage m, Stage n, std::uint64_t size_limit) {
    const BigInt count = index_count(spec, m, n);
    if (count > size_limit) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    "|I_{" + std::to_string(m) + "," + std::to_string(n) + "}| = " + count.str() +
                        " exceeds limit " + std::to_string(size_limit) + "; use residue histograms");
    }
    IndexSet out{m, m, {BigInt(0)}};
    for (Stage j = m; j < n; ++j) {
        auto offsets = stage_offsets(spec, j, size_limit);
        std::vector<BigInt> next;
        next.reserve(offsets.size() * out.indices.size());
        // o_{t+1} >= o_t + h_j > o_t + max(I_{m,j}), so this order is sorted.
        for (const auto& o : offsets) {
            for (const auto& i : out.indices) next.push_back(o + i);
        }
        out.indices = std::move(next);
        out.n = j + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Residue histograms

namespace {

void require_modulus(std::uint64_t k) {
    if (k < 2) throw Error(ErrorKind::InvalidModulus, "modulus must be >= 2, got " + std::to_string(k));
    if (k > kDenseModulusLimit) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    "modulus " + std::to_string(k) + " exceeds dense histogram limit " +
                        std::to_string(kDenseModulusLimit));
    }
}

// Adds residues of j*h + shift (mod k) for j in [first, last).
void add_run(std::vector<BigInt>& hist, const BigInt& first, const BigInt& last, std::uint64_t h_mod,
             std::uint64_t shift_mod) {
    if (last <= first) return;
    const std::uint64_t k = hist.size();
    const std::uint64_t g = std::gcd(h_mod, k);  // gcd(0, k) = k
    const std::uint64_t period = k / g;
    const BigInt length = last - first;
    const BigInt full = length / period;
    const auto rem = static_cast<std::uint64_t>(length % period);
    // Residue of j*h + shift at j = first.
    const auto start = static_cast<std::uint64_t>(
        (mod_u64(first, k) * static_cast<unsigned __int128>(h_mod) + shift_mod) % k);
    std::uint64_t residue = start;
    for (std::uint64_t t = 0; t < period; ++t) {
        hist[residue] += full;
        if (t < rem) hist[residue] += 1;
        residue = static_cast<std::uint64_t>((static_cast<unsigned __int128>(residue) + h_mod) % k);
    }
}

}  // namespace

std::vector<BigInt> offset_histogram(const RankOneSpec& spec, Stage n, std::uint64_t k) {
    require_modulus(k);
    auto& c = spec.cache();
    {
        std::shared_lock lock(c.mutex);
        auto it = c.offsets.find({n, k});
        if (it != c.offsets.end()) return it->second;
    }
    const auto& p = spec.stage(n);
    const std::uint64_t h_mod = mod_u64(height(spec, n), k);
    std::vector<BigInt> hist(k, BigInt(0));
    BigInt run_start = 0;
    std::uint64_t prefix_mod = 0;
    for (const auto& [col, count] : p.spacers) {
        // Columns j in [run_start, col) carry the same spacer prefix sum.
        add_run(hist, run_start, std::min(col, p.cuts), h_mod, prefix_mod);
        prefix_mod = (prefix_mod + mod_u64(count, k)) % k;
        run_start = col;
    }
    add_run(hist, run_start, p.cuts, h_mod, prefix_mod);

    std::unique_lock lock(c.mutex);
    c.offsets.emplace(std::make_pair(n, k), hist);
    return hist;
}

std::vector<BigInt> convolve_mod(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    const std::size_t k = a.size();
    if (b.size() != k) throw Error(ErrorKind::InvalidModulus, "convolving histograms of different moduli");
    std::vector<std::size_t> support;
    for (std::size_t y = 0; y < k; ++y) {
        if (b[y] != 0) support.push_back(y);
    }
    std::vector<BigInt> out(k, BigInt(0));
    for (std::size_t x = 0; x < k; ++x) {
        if (a[x] == 0) continue;
        for (std::size_t y : support) {
            std::size_t z = x + y;
            if (z >= k) z -= k;
            out[z] += a[x] * b[y];
        }
    }
    return out;
}

ResidueHistogram residue_histogram(const RankOneSpec& spec, Stage m, Stage n, std::uint64_t k) {
    require_modulus(k);
    if (n < m) throw Error(ErrorKind::InvalidSpec, "residue histogram needs n >= m");
    auto& c = spec.cache();
    ResidueHistogram current;
    {
        std::shared_lock lock(c.mutex);
        auto it = c.histograms.find({m, n, k});
        if (it != c.histograms.end()) return it->second;
        // Resume from the deepest cached prefix (m, j, k) with j < n.
        for (Stage j = n; j-- > m;) {
            auto prefix = c.histograms.find({m, j, k});
            if (prefix != c.histograms.end()) {
                current = prefix->second;
                break;
            }
        }
    }
    if (current.counts.empty()) {
        current = ResidueHistogram{k, m, m, std::vector<BigInt>(k, BigInt(0)), BigInt(1)};
        current.counts[0] = 1;
    }
    while (current.n < n) {
        const Stage j = current.n;
        ResidueHistogram next{k, m, j + 1, convolve_mod(offset_histogram(spec, j, k), current.counts),
                              current.total * spec.stage(j).cuts};
        {
            std::unique_lock lock(c.mutex);
            c.histograms.emplace(std::make_tuple(m, j + 1, k), next);
        }
        current = std::move(next);
    }
    return current;
}

bool offsets_aligned(const RankOneSpec& spec, Stage n, const BigInt& k) {
    if (k < 1) throw Error(ErrorKind::InvalidModulus, "modulus must be positive");
    const auto& p = spec.stage(n);
    const BigInt h = height(spec, n);
    // Consecutive offsets differ by h_n + s_{n,j} for 1 <= j < r_n.
    BigInt interior_spacers = 0;
    for (const auto& [col, count] : p.spacers) {
        if (col >= p.cuts) break;
        ++interior_spacers;
        if ((h + count) % k != 0) return false;
    }
    const bool some_gap_without_spacer = interior_spacers < p.cuts - 1;
    return !some_gap_without_spacer || h % k == 0;
}

// ---------------------------------------------------------------------------
// Measure bookkeeping

MassReport mass_check(const RankOneSpec& spec, Stage depth) {
    MassReport report;
    report.depth = depth;
    Rational running = 0;
    for (Stage n = 0; n < depth; ++n) {
        const auto& p = spec.stage(n);
        const BigInt next = height(spec, n + 1);
        Rational term(next - p.cuts * height(spec, n), next);
        running += term;
        report.terms.push_back(term);
        report.partial_sums.push_back(running);
    }
    return report;
}

BigInt base_inverse_measure(const RankOneSpec& spec, Stage n) { return index_count(spec, 0, n); }

Rational tower_mass(const RankOneSpec& spec, Stage n) {
    return Rational(height(spec, n), base_inverse_measure(spec, n));
}

}  // namespace rankone
