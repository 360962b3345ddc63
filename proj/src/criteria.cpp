#include "rankone/criteria.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "rankone/error.hpp"

namespace rankone {

std::string to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::PassAtDepth: return "PASS_AT_DEPTH";
        case VerdictStatus::FailWitness: return "FAIL_WITNESS";
        case VerdictStatus::UnknownAtDepth: return "UNKNOWN_AT_DEPTH";
    }
    return "UNKNOWN_AT_DEPTH";
}

std::string to_string(SummabilityReading r) {
    return r == SummabilityReading::OffClassOverWindow ? "off_class_over_window" : "literal_zero_class";
}

namespace {

void require_modulus(const BigInt& k) {
    if (k < 2) throw Error(ErrorKind::InvalidModulus, "modulus must be >= 2, got " + k.str());
}

void require_window(Stage m, Stage n) {
    if (n < m) {
        throw Error(ErrorKind::InvalidSpec,
                    "window needs n >= m, got m=" + std::to_string(m) + " n=" + std::to_string(n));
    }
}

// Least a in [m, n] such that every stage t in [a, n) has all offsets
// divisible by k. Then I_{m,n} mod k is I_{m,a} mod k, each class repeated
// |I_{a,n}| times.
Stage aligned_start(const RankOneSpec& spec, Stage m, Stage n, const BigInt& k) {
    Stage a = n;
    while (a > m && offsets_aligned(spec, a - 1, k)) --a;
    return a;
}

std::string window_label(Stage m, Stage n) {
    return "(" + std::to_string(m) + "," + std::to_string(n) + ")";
}

}  // namespace

CyclicDiscrepancy cyclic_discrepancy(const RankOneSpec& spec, Stage m, Stage n, const BigInt& k,
                                     std::uint64_t size_limit) {
    require_window(m, n);
    require_modulus(k);
    CyclicDiscrepancy d{m, n, k, 0, 0, "trivial"};
    if (m == n) return d;

    if (k <= kDenseModulusLimit) {
        const auto h = residue_histogram(spec, m, n, k.convert_to<std::uint64_t>());
        std::uint64_t best = 0;
        for (std::uint64_t c = 1; c < h.k; ++c) {
            if (h.counts[c] > h.counts[best]) best = c;
        }
        d.best_j = best;
        d.delta = Rational(1) - Rational(h.counts[best], h.total);
        d.method = "histogram";
        return d;
    }

    const Stage a = aligned_start(spec, m, n, k);
    if (a == m) {
        d.method = "aligned";
        return d;
    }
    const BigInt count = index_count(spec, m, a);
    if (k > height(spec, a) - height(spec, m)) {
        // I_{m,a} lies in [0, h_a - h_m], so its residues are distinct.
        d.delta = Rational(1) - Rational(1, count);
        d.method = "aligned_distinct";
        return d;
    }
    if (count > size_limit) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    "modulus " + k.str() + " needs |I_{" + std::to_string(m) + "," + std::to_string(a) +
                        "}| = " + count.str() + " explicit indices");
    }
    std::map<BigInt, BigInt> classes;
    for (const auto& i : index_set(spec, m, a, size_limit).indices) classes[i % k] += 1;
    auto best = classes.begin();
    for (auto it = classes.begin(); it != classes.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    d.best_j = best->first;
    d.delta = Rational(1) - Rational(best->second, count);
    d.method = "enumerated";
    return d;
}

SymmetricDifferenceFit symmetric_difference_fit(const RankOneSpec& spec, Stage l, Stage m, const BigInt& k,
                                                std::uint64_t size_limit) {
    require_window(l, m);
    require_modulus(k);
    SymmetricDifferenceFit fit;
    fit.l = l;
    fit.m = m;
    fit.k = k;
    const BigInt hm = height(spec, m);
    const BigInt total = index_count(spec, l, m);

    if (k >= hm) {
        // Every class below h_m holds exactly one level, so D = I_{l,m} fits exactly.
        fit.d_size = total;
        fit.eps_star = 0;
        fit.method = "k_ge_height";
        if (total <= size_limit) fit.best_d = index_set(spec, l, m, size_limit).indices;
        return fit;
    }

    if (k <= kDenseModulusLimit) {
        const auto kk = k.convert_to<std::uint64_t>();
        const auto hist = residue_histogram(spec, l, m, kk);
        const BigInt full = hm / k;
        const auto rem = static_cast<std::uint64_t>(hm % k);
        BigInt mismatch = 0;
        std::vector<BigInt> d;
        for (std::uint64_t c = 0; c < kk; ++c) {
            const BigInt all = c < rem ? full + 1 : full;
            const BigInt& in = hist.counts[c];
            if (2 * in > all) {
                d.emplace_back(c);
                mismatch += all - in;
            } else {
                mismatch += in;
            }
        }
        fit.d_size = d.size();
        fit.best_d = std::move(d);
        fit.eps_star = Rational(mismatch, total);
        fit.method = "histogram";
        return fit;
    }

    if (hm % k == 0) {
        const Stage a = aligned_start(spec, l, m, k);
        if (height(spec, a) - height(spec, l) < k) {
            // |I_{l,a}| distinct classes, each holding R = |I_{a,m}| indices out of A = h_m / k.
            const BigInt r = index_count(spec, a, m);
            const BigInt all = hm / k;
            const BigInt blocks = index_count(spec, l, a);
            const bool keep = 2 * r > all;
            fit.eps_star = Rational(std::min(r, BigInt(all - r)), r);
            fit.d_size = keep ? blocks : BigInt(0);
            if (!keep) {
                fit.best_d = std::vector<BigInt>{};
            } else if (blocks <= size_limit) {
                fit.best_d = index_set(spec, l, a, size_limit).indices;
            }
            fit.method = "aligned_blocks";
            return fit;
        }
    }
    throw Error(ErrorKind::SizeLimitExceeded, "no exact fit method for modulus " + k.str() + " at (l,m)=" +
                                                  window_label(l, m));
}

CriterionVerdict check_cyclic_factor(const RankOneSpec& spec, const BigInt& k, const Rational& eta, Stage start,
                                     Stage depth) {
    require_modulus(k);
    if (start > depth) throw Error(ErrorKind::InvalidSpec, "start stage beyond depth");
    CriterionVerdict v;
    v.criterion = "cyclic_factor k=" + k.str();
    v.depth = depth;

    std::vector<Rational> row_max(depth + 2, Rational(0));
    std::size_t worst = 0;
    for (Stage m = start; m <= depth; ++m) {
        for (Stage n = m; n <= depth; ++n) {
            auto d = cyclic_discrepancy(spec, m, n, k);
            row_max[m] = std::max(row_max[m], d.delta);
            if (v.windows.empty() || d.delta > v.windows[worst].delta) worst = v.windows.size();
            v.windows.push_back(std::move(d));
        }
    }
    Rational running = 0;
    for (Stage m = depth + 1; m-- > start;) {
        running = std::max(running, row_max[m]);
        v.profile[m] = running;
    }

    const auto& w = v.windows[worst];
    if (v.profile[start] < eta) {
        v.status = VerdictStatus::PassAtDepth;
    } else {
        v.status = VerdictStatus::UnknownAtDepth;
        v.notes.push_back("worst window " + window_label(w.m, w.n) + " delta " + to_fraction_string(w.delta) +
                          " >= eta " + to_fraction_string(eta) + "; larger start stages may still pass");
    }
    return v;
}

SummabilityProfile summability_profile(const RankOneSpec& spec, const BigInt& k, const std::vector<Stage>& q,
                                       SummabilityReading reading) {
    require_modulus(k);
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (q[i] <= q[i - 1]) throw Error(ErrorKind::InvalidSpec, "stage sequence must be strictly increasing");
    }
    if (k > kDenseModulusLimit) throw Error(ErrorKind::SizeLimitExceeded, "summability modulus too large");
    SummabilityProfile p{k, reading, q, {}, {}};
    Rational running = 0;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        const auto h = residue_histogram(spec, q[i], q[i + 1], k.convert_to<std::uint64_t>());
        Rational term = reading == SummabilityReading::OffClassOverWindow
                            ? Rational(h.total - h.counts[0], h.total)
                            : Rational(h.counts[0], index_count(spec, q[i], q[i]));
        running += term;
        p.terms.push_back(term);
        p.partial_sums.push_back(running);
    }
    return p;
}

std::vector<ErgodicityProbeRow> total_ergodicity_probe(const RankOneSpec& spec, std::uint64_t k_max,
                                                       const Rational& eta, Stage start, Stage depth) {
    if (k_max < 2) throw Error(ErrorKind::InvalidModulus, "k_max must be >= 2");
    if (start >= depth) throw Error(ErrorKind::InvalidSpec, "probe needs start < depth");
    std::vector<ErgodicityProbeRow> rows;
    for (std::uint64_t k = 2; k <= k_max; ++k) {
        ErgodicityProbeRow row;
        row.k = k;
        row.verdict = check_cyclic_factor(spec, k, eta, start, depth);
        const CyclicDiscrepancy* best = nullptr;
        for (const auto& w : row.verdict.windows) {
            if (w.m == w.n) continue;
            if (!best || w.delta < best->delta) best = &w;
        }
        row.min_window = *best;
        row.min_window_delta = best->delta;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

void require_in_k(const Supernatural& target, const BigInt& k) {
    if (!target.divides(k)) {
        throw Error(ErrorKind::ProbeNotInK, "probe " + k.str() + " does not divide " + target.to_string());
    }
}

}  // namespace

CriterionVerdict check_odometer_factor(const RankOneSpec& spec, const Supernatural& target,
                                       const std::vector<BigInt>& probes, const Rational& eta, Stage start,
                                       Stage depth) {
    for (const auto& k : probes) require_in_k(target, k);
    CriterionVerdict v;
    v.criterion = "odometer_factor " + target.to_string();
    v.depth = depth;
    v.status = VerdictStatus::PassAtDepth;
    if (probes.empty()) {
        v.zero_evidence = true;
        v.notes.push_back("no probes: vacuous pass");
        return v;
    }
    for (const auto& k : probes) {
        auto part = check_cyclic_factor(spec, k, eta, start, depth);
        if (!part.passed() && v.passed()) {
            v.status = VerdictStatus::UnknownAtDepth;
            v.notes.push_back("probe k=" + k.str() + " did not pass");
        }
        v.parts.push_back(std::move(part));
    }
    return v;
}

namespace {

// Fits for every m in [max(start, l), depth]; stops at the first m that
// misses eps.
bool fits_below(const RankOneSpec& spec, Stage l, const BigInt& k, const Rational& eps, Stage start, Stage depth,
                std::vector<SymmetricDifferenceFit>& out) {
    for (Stage m = std::max(start, l); m <= depth; ++m) {
        out.push_back(symmetric_difference_fit(spec, l, m, k));
        if (out.back().eps_star >= eps) return false;
    }
    return true;
}

std::string row_label(Stage l, const Rational& eps) {
    return "fit l=" + std::to_string(l) + " eps=" + to_fraction_string(eps);
}

constexpr const char* kFitRangeNote = "fit range: levels 0 <= i < h_m";

}  // namespace

CriterionVerdict check_isomorphic_to_odometer(const RankOneSpec& spec, const Supernatural& target,
                                              const std::vector<IsoScheduleRow>& schedule,
                                              const FactorProbes& factor) {
    if (schedule.empty()) throw Error(ErrorKind::InvalidSpec, "isomorphism schedule is empty");
    for (const auto& row : schedule) {
        if (row.start > row.depth) throw Error(ErrorKind::InvalidSpec, "schedule row start beyond depth");
        for (const auto& k : row.k_candidates) {
            require_modulus(k);
            require_in_k(target, k);
        }
    }

    CriterionVerdict v;
    v.criterion = "isomorphic_to_odometer " + target.to_string();
    v.depth = factor.depth;
    v.notes.push_back(kFitRangeNote);

    auto factor_part = check_odometer_factor(spec, target, factor.probes, factor.eta, factor.start, factor.depth);
    v.zero_evidence = factor_part.zero_evidence;
    bool pass = factor_part.passed();
    if (!pass) v.notes.push_back("cyclic-factor probes did not all pass");
    v.parts.push_back(std::move(factor_part));

    for (const auto& row : schedule) {
        v.depth = std::max(v.depth, row.depth);
        CriterionVerdict part;
        part.criterion = row_label(row.l, row.eps);
        part.depth = row.depth;
        part.status = VerdictStatus::UnknownAtDepth;
        for (const auto& k : row.k_candidates) {
            std::vector<SymmetricDifferenceFit> fits;
            const bool ok = fits_below(spec, row.l, k, row.eps, row.start, row.depth, fits);
            if (ok) {
                part.status = VerdictStatus::PassAtDepth;
                part.notes.push_back("witness k=" + k.str());
                part.fits = std::move(fits);
                break;
            }
            const auto& miss = fits.back();
            part.notes.push_back("k=" + k.str() + " misses at m=" + std::to_string(miss.m) + " with eps_star " +
                                 to_fraction_string(miss.eps_star));
            part.fits.insert(part.fits.end(), fits.begin(), fits.end());
        }
        if (row.k_candidates.empty()) part.notes.push_back("no candidates");
        if (!part.passed()) {
            pass = false;
            v.notes.push_back(part.criterion + " has no witness among the candidates");
        }
        v.parts.push_back(std::move(part));
    }
    v.status = pass ? VerdictStatus::PassAtDepth : VerdictStatus::UnknownAtDepth;
    return v;
}

SearchResult search_some_odometer(const RankOneSpec& spec, const SearchOptions& options) {
    if (options.k_budget < 2) throw Error(ErrorKind::InvalidSpec, "k_budget must be >= 2");
    if (options.start > options.depth) throw Error(ErrorKind::InvalidSpec, "start stage beyond depth");

    SearchResult result;
    CriterionVerdict& v = result.verdict;
    v.criterion = "some_odometer";
    v.depth = options.depth;
    v.notes.push_back(kFitRangeNote);
    v.zero_evidence = std::all_of(options.eps.begin(), options.eps.end(), [](const Rational& e) { return e >= 1; });
    if (v.zero_evidence) v.notes.push_back("every eps >= 1: fits carry no evidence");

    std::map<std::uint64_t, bool> factor_ok;
    const auto passes_factor = [&](std::uint64_t k) {
        auto it = factor_ok.find(k);
        if (it != factor_ok.end()) return it->second;
        const bool ok = check_cyclic_factor(spec, k, options.eta, options.start, options.depth).passed();
        factor_ok.emplace(k, ok);
        return ok;
    };

    bool all_found = true;
    BigInt lcm = 1;
    for (Stage l = 0; l <= options.l_max; ++l) {
        for (const auto& eps : options.eps) {
            CriterionVerdict part;
            part.criterion = row_label(l, eps);
            part.depth = options.depth;
            part.status = VerdictStatus::UnknownAtDepth;
            for (std::uint64_t k = 2; k <= options.k_budget; ++k) {
                if (!passes_factor(k)) continue;
                std::vector<SymmetricDifferenceFit> fits;
                if (!fits_below(spec, l, k, eps, options.start, options.depth, fits)) continue;
                part.status = VerdictStatus::PassAtDepth;
                part.fits = std::move(fits);
                part.notes.push_back("witness k=" + std::to_string(k));
                result.witnesses.push_back({{l, eps}, k});
                lcm = boost::multiprecision::lcm(lcm, BigInt(k));
                if (eps < 1 && BigInt(k) < height(spec, l)) {
                    part.notes.push_back("witness below h_l although eps < 1");
                }
                break;
            }
            if (!part.passed()) {
                all_found = false;
                part.notes.push_back(std::string(to_string(ErrorKind::BudgetExhausted)) + ": no k <= " +
                                     std::to_string(options.k_budget));
            }
            v.parts.push_back(std::move(part));
        }
    }

    if (all_found) {
        v.status = VerdictStatus::PassAtDepth;
        Supernatural s;
        for (const auto& [p, e] : factorize(lcm)) s.set(p, PrimeExponent::finite(e));
        s.mark_truncated(options.depth);
        result.candidate = std::move(s);
    } else {
        v.status = VerdictStatus::UnknownAtDepth;
        v.notes.push_back("search budget exhausted for some (l, eps)");
    }
    return result;
}

}  // namespace rankone
