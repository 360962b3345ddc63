#include "rankone/measure.hpp"

#include <algorithm>
#include <numeric>

#include "rankone/error.hpp"

namespace rankone {

LevelSet::LevelSet(RankOneSpec spec, Stage depth, std::variant<Explicit, Residues> rep)
    : spec_(std::move(spec)), depth_(depth), height_(height(spec_, depth)), rep_(std::move(rep)) {}

LevelSet LevelSet::levels(RankOneSpec spec, Stage depth, std::vector<BigInt> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    const BigInt h = height(spec, depth);
    if (!members.empty() && (members.front() < 0 || members.back() >= h)) {
        throw Error(ErrorKind::InvalidSpec, "level outside [0, h_" + std::to_string(depth) + ")");
    }
    return LevelSet(std::move(spec), depth, Explicit{std::move(members)});
}

LevelSet LevelSet::residue_family(RankOneSpec spec, Stage depth, std::uint64_t k,
                                  std::vector<std::uint64_t> classes) {
    if (k < 1) throw Error(ErrorKind::InvalidModulus, "residue family needs k >= 1");
    if (k > kDenseModulusLimit) throw Error(ErrorKind::SizeLimitExceeded, "residue family modulus too large");
    Residues r{k, std::vector<bool>(k, false)};
    for (auto c : classes) {
        if (c >= k) throw Error(ErrorKind::InvalidModulus, "class " + std::to_string(c) + " not below k");
        r.classes[c] = true;
    }
    return LevelSet(std::move(spec), depth, std::move(r));
}

LevelSet LevelSet::tower(RankOneSpec spec, Stage depth) {
    return residue_family(std::move(spec), depth, 1, {0});
}

BigInt LevelSet::count() const {
    if (const auto* e = std::get_if<Explicit>(&rep_)) return BigInt(e->members.size());
    const auto& r = std::get<Residues>(rep_);
    const BigInt full = height_ / r.k;
    const auto rem = static_cast<std::uint64_t>(height_ % r.k);
    BigInt total = 0;
    for (std::uint64_t c = 0; c < r.k; ++c) {
        if (!r.classes[c]) continue;
        total += full;
        if (c < rem) total += 1;
    }
    return total;
}

Rational LevelSet::measure() const { return Rational(count(), base_inverse_measure(spec_, depth_)); }

bool LevelSet::contains(const BigInt& level) const {
    if (level < 0 || level >= height_) return false;
    if (const auto* e = std::get_if<Explicit>(&rep_)) {
        return std::binary_search(e->members.begin(), e->members.end(), level);
    }
    const auto& r = std::get<Residues>(rep_);
    return r.classes[mod_u64(level, r.k)];
}

std::vector<BigInt> LevelSet::members(std::uint64_t limit) const {
    if (const auto* e = std::get_if<Explicit>(&rep_)) {
        if (e->members.size() > limit) throw Error(ErrorKind::SizeLimitExceeded, "level set too large");
        return e->members;
    }
    if (count() > limit) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    "residue family has " + count().str() + " levels, limit " + std::to_string(limit));
    }
    const auto& r = std::get<Residues>(rep_);
    std::vector<BigInt> out;
    const auto h = height_.convert_to<std::uint64_t>();
    for (std::uint64_t i = 0; i < h; ++i) {
        if (r.classes[i % r.k]) out.emplace_back(i);
    }
    return out;
}

std::uint64_t LevelSet::residue_modulus() const {
    if (!is_symbolic()) throw Error(ErrorKind::InvalidSpec, "explicit level set has no modulus");
    return std::get<Residues>(rep_).k;
}

const std::vector<bool>& LevelSet::residue_classes() const {
    if (!is_symbolic()) throw Error(ErrorKind::InvalidSpec, "explicit level set has no residue classes");
    return std::get<Residues>(rep_).classes;
}

LevelSet refine(const LevelSet& a, Stage to, std::uint64_t size_limit) {
    if (to < a.depth()) throw Error(ErrorKind::InvalidSpec, "cannot refine to a shallower stage");
    if (to == a.depth()) return a;
    const auto offsets = index_set(a.spec(), a.depth(), to, size_limit).indices;
    const auto base = a.members(size_limit);
    if (BigInt(offsets.size()) * base.size() > size_limit) {
        throw Error(ErrorKind::SizeLimitExceeded, "refined level set exceeds size limit");
    }
    std::vector<BigInt> out;
    out.reserve(offsets.size() * base.size());
    for (const auto& o : offsets) {
        for (const auto& i : base) out.push_back(o + i);
    }
    return LevelSet::levels(a.spec(), to, std::move(out));
}

Rational containment_fraction(const LevelSet& a, const LevelSet& b, std::uint64_t size_limit) {
    const Stage depth = std::max(a.depth(), b.depth());
    const LevelSet ra = refine(a, depth, size_limit);
    const LevelSet rb = b.depth() == depth ? b : refine(b, depth, size_limit);
    const auto members = ra.members(size_limit);
    if (members.empty()) throw Error(ErrorKind::EmptySet, "containment fraction of an empty set");
    std::size_t outside = 0;
    for (const auto& i : members) {
        if (!rb.contains(i)) ++outside;
    }
    // Both sets live on one tower, so the level measure cancels.
    return Rational(BigInt(outside), BigInt(members.size()));
}

bool is_eps_contained(const LevelSet& a, const LevelSet& b, const Rational& eps, std::uint64_t size_limit) {
    return containment_fraction(a, b, size_limit) < eps;
}

LevelSet shift(const LevelSet& a, long long t, std::uint64_t size_limit) {
    const BigInt h = height(a.spec(), a.depth());
    std::vector<BigInt> out;
    for (const auto& i : a.members(size_limit)) {
        BigInt j = i + t;
        if (j >= 0 && j < h) out.push_back(std::move(j));
    }
    return LevelSet::levels(a.spec(), a.depth(), std::move(out));
}

// ---------------------------------------------------------------------------
// Approximating maps

std::uint64_t ApproximatingMap::project(const BigInt& level) const {
    const auto r = mod_u64(level, k);
    return (r + k - offset) % k;
}

ApproximationSchedule default_schedule(Stage depth, Stage start) {
    ApproximationSchedule s;
    s.depth = depth;
    s.start = start;
    s.eta = [](std::size_t alpha) { return Rational(1, pow_big(2, static_cast<unsigned>(alpha + 2))); };
    s.mass_floor = [](std::size_t alpha) {
        return Rational(1) - Rational(1, pow_big(2, static_cast<unsigned>(alpha + 1)));
    };
    return s;
}

namespace {

struct Majority {
    std::uint64_t residue = 0;
    BigInt count;
};

Majority majority_class(const ResidueHistogram& h) {
    Majority best{0, h.counts[0]};
    for (std::uint64_t c = 1; c < h.k; ++c) {
        if (h.counts[c] > best.count) best = {c, h.counts[c]};
    }
    return best;
}

}  // namespace

std::vector<ApproximatingMap> build_approximating_maps(const RankOneSpec& spec, std::uint64_t k,
                                                       std::size_t alpha_max,
                                                       const ApproximationSchedule& schedule) {
    if (k < 2) throw Error(ErrorKind::InvalidModulus, "approximating maps need k >= 2");
    if (alpha_max == 0) return {};
    const Stage depth = schedule.depth;
    if (schedule.start > depth) throw Error(ErrorKind::InvalidSpec, "start stage beyond depth");
    const auto eta = schedule.eta ? schedule.eta : default_schedule(depth).eta;
    const auto floor = schedule.mass_floor ? schedule.mass_floor : default_schedule(depth).mass_floor;

    // worst[N] = max discrepancy over windows N <= m <= n <= depth.
    std::vector<Rational> worst(depth + 2, Rational(0));
    for (Stage m = depth + 1; m-- > schedule.start;) {
        Rational row = 0;
        for (Stage n = m; n <= depth; ++n) {
            const auto h = residue_histogram(spec, m, n, k);
            Rational delta = Rational(1) - Rational(majority_class(h).count, h.total);
            row = std::max(row, delta);
        }
        worst[m] = std::max(row, worst[m + 1]);
    }

    const Rational deepest_mass = tower_mass(spec, depth);
    std::vector<Stage> stages;
    std::vector<Rational> fractions;
    for (std::size_t alpha = 0; alpha <= alpha_max; ++alpha) {
        Stage candidate = stages.empty() ? schedule.start : stages.back() + 1;
        // The last stage only closes the window of map alpha_max - 1.
        const std::size_t level = std::min(alpha, alpha_max - 1);
        bool found = false;
        for (; candidate <= depth; ++candidate) {
            Rational fraction = tower_mass(spec, candidate) / deepest_mass;
            if (worst[candidate] < eta(level) && fraction >= floor(alpha)) {
                stages.push_back(candidate);
                fractions.push_back(fraction);
                found = true;
                break;
            }
        }
        if (!found) {
            throw Error(ErrorKind::CriterionUnmetAtDepth,
                        "no stage N_" + std::to_string(alpha) + " <= " + std::to_string(depth) +
                            " meets eta and mass floor for k = " + std::to_string(k));
        }
    }

    std::vector<ApproximatingMap> maps;
    std::uint64_t accumulated = 0;
    for (std::size_t alpha = 0; alpha < alpha_max; ++alpha) {
        ApproximatingMap map;
        map.k = k;
        map.alpha = alpha;
        map.stage = stages[alpha];
        map.next_stage = stages[alpha + 1];
        map.eta = eta(alpha);
        map.mass_fraction = fractions[alpha];
        map.offset = accumulated;

        const auto hist = residue_histogram(spec, map.stage, map.next_stage, k);
        const auto best = majority_class(hist);
        map.step = best.residue;
        // Level i of stage N_alpha splits into levels o + i of stage N_{alpha+1},
        // o in I_{N_alpha, N_{alpha+1}}; phi_{alpha+1} = [phi_alpha + j_alpha] iff [o]_k = j_alpha.
        const BigInt bad_levels = height(spec, map.stage) * (hist.total - best.count);
        map.defect = Rational(bad_levels, base_inverse_measure(spec, map.next_stage)) / deepest_mass;
        if (map.defect >= map.eta) {
            throw Error(ErrorKind::CriterionUnmetAtDepth, "defect of map " + std::to_string(alpha) + " not below eta");
        }
        for (std::uint64_t c = 0; c < k; ++c) {
            map.fibers.push_back(LevelSet::residue_family(spec, map.stage, k, {(c + accumulated) % k}));
        }
        accumulated = (accumulated + map.step) % k;
        maps.push_back(std::move(map));
    }
    return maps;
}

Rational equivariance_defect(const ApproximatingMap& map, std::uint64_t size_limit) {
    const RankOneSpec& spec = map.fibers.empty() ? throw Error(ErrorKind::InvalidSpec, "map without fibers")
                                                 : map.fibers.front().spec();
    const BigInt h = height(spec, map.stage);
    if (h < 2) return 0;
    const BigInt steps = h - 1;
    const auto fiber_of = [&](const BigInt& level) -> std::optional<std::uint64_t> {
        for (std::uint64_t c = 0; c < map.fibers.size(); ++c) {
            if (map.fibers[c].contains(level)) return c;
        }
        return std::nullopt;
    };
    const auto advances = [&](const BigInt& level) {
        auto here = fiber_of(level);
        auto next = fiber_of(level + 1);
        return here && next && *next == (*here + 1) % map.k;
    };

    std::optional<std::uint64_t> period;
    for (const auto& f : map.fibers) {
        if (!f.is_symbolic()) {
            period.reset();
            break;
        }
        const auto m = f.residue_modulus();
        period = period ? std::lcm(*period, m) : m;
    }

    BigInt bad = 0;
    if (period && *period <= kDenseModulusLimit) {
        // Membership of every fiber depends on i mod period only.
        const std::uint64_t p = *period;
        const BigInt full = steps / p;
        const auto rem = static_cast<std::uint64_t>(steps % p);
        for (std::uint64_t r = 0; r < p && r < steps; ++r) {
            if (advances(BigInt(r))) continue;
            bad += full;
            if (r < rem) bad += 1;
        }
    } else {
        if (steps > size_limit) throw Error(ErrorKind::SizeLimitExceeded, "tower too tall to scan");
        for (BigInt i = 0; i < steps; ++i) {
            if (!advances(i)) bad += 1;
        }
    }
    return Rational(bad, steps);
}

}  // namespace rankone
