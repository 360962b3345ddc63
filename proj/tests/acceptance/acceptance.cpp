// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "rankone/cli.hpp"
#include "rankone/constructions.hpp"
#include "rankone/criteria.hpp"
#include "rankone/error.hpp"
#include "rankone/measure.hpp"
#include "rankone/odometers.hpp"
#include "rankone/words.hpp"
#include "support/helpers.hpp"

using namespace rankone;
namespace rt = rankone::testing;

namespace {

class Tally {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && first_failure_.empty()) first_failure_ = what;
        failures_ += !ok;
    }
    bool ok() const { return failures_ == 0; }
    std::string detail() const {
        std::ostringstream s;
        s << checks_ << " checks";
        if (failures_) s << ", " << failures_ << " failed; first: " << first_failure_;
        return s.str();
    }

private:
    std::size_t checks_ = 0;
    std::size_t failures_ = 0;
    std::string first_failure_;
};

std::string window(Stage m, Stage n, const BigInt& k) {
    return "m=" + std::to_string(m) + " n=" + std::to_string(n) + " k=" + to_string(k);
}

std::vector<Preset> oracle_presets() {
    return {build_chacon(), build_gapped_pairs(), build_afp(OdometerSpec::periodic(4, {4})), build_cyclic_embedding(6),
            build_dyadic()};
}

// (preset, m, n) with h_n <= 10^5.
template <class F>
void for_small_windows(F&& f) {
    for (const auto& p : oracle_presets()) {
        for (Stage n = 0; height(p.spec, n) <= 100'000; ++n) {
            for (Stage m = 0; m <= n; ++m) f(p, m, n);
        }
    }
}

void heights_identity(Tally& t) {
    const auto spec = build_gapped_pairs().spec;
    for (Stage n = 0; n <= 20; ++n) {
        const BigInt two_n = pow_big(2, static_cast<unsigned>(n));
        t.expect(height(spec, n) == two_n * (2 * two_n - 1), "h_" + std::to_string(n));
    }
}

void oracle_equivalence(Tally& t) {
    for_small_windows([&](const Preset& p, Stage m, Stage n) {
        const auto occurrences = canonical_occurrences(p.spec, m, n);
        const auto set = index_set(p.spec, m, n).indices;
        bool same = occurrences.size() == set.size();
        for (std::size_t i = 0; same && i < set.size(); ++i) same = set[i] == occurrences[i];
        t.expect(same, p.name + " " + window(m, n, 0));
        // The blocks really are copies of v_m.
        const auto vm = generate_word(p.spec, m).symbols;
        const auto vn = generate_word(p.spec, n).symbols;
        for (const auto o : occurrences) {
            if (vn.compare(o, vm.size(), vm) != 0) {
                t.expect(false, p.name + " block at " + std::to_string(o));
                break;
            }
        }
    });
}

void histogram_consistency(Tally& t) {
    for_small_windows([&](const Preset& p, Stage m, Stage n) {
        const auto set = index_set(p.spec, m, n).indices;
        for (std::uint64_t k = 2; k <= 12; ++k) {
            t.expect(residue_histogram(p.spec, m, n, k).counts == rt::explicit_histogram(set, k),
                     p.name + " " + window(m, n, k));
        }
    });
}

void dyadic_factor(Tally& t) {
    const auto spec = build_gapped_pairs().spec;
    for (unsigned a = 1; a <= 4; ++a) {
        const BigInt k = pow_big(2, a);
        for (Stage m = a; m <= 14; ++m) {
            for (Stage n = m; n <= m + 10; ++n) {
                t.expect(cyclic_discrepancy(spec, m, n, k).delta == 0, window(m, n, k));
            }
        }
    }
}

void odd_obstruction(Tally& t) {
    const auto spec = build_gapped_pairs().spec;
    const Rational bound(1, 4);
    for (std::uint64_t k : {3, 5, 7, 9}) {
        for (Stage n = 3; n <= 16; ++n) {
            for (Stage m = 2; m < n; ++m) {
                const auto d = cyclic_discrepancy(spec, m, n, k);
                t.expect(d.delta >= bound, window(m, n, k) + " delta " + to_fraction_string(d.delta));
                if (height(spec, n) <= 100'000) {
                    t.expect(d.delta == rt::brute_delta(index_set(spec, m, n).indices, k),
                             "oracle " + window(m, n, k));
                }
            }
        }
    }
}

void isomorphism_failure(Tally& t) {
    const auto spec = build_gapped_pairs().spec;
    const Rational c(1);  // frozen from the brute-force run
    for (unsigned a = 2; a <= 4; ++a) {
        const std::uint64_t k = std::uint64_t{1} << a;
        for (Stage m = 4; m <= 8; ++m) {
            const auto fit = symmetric_difference_fit(spec, 1, m, k);
            t.expect(fit.eps_star >= c, window(1, m, k) + " eps " + to_fraction_string(fit.eps_star));
            const auto set = index_set(spec, 1, m).indices;
            const auto h = height(spec, m).convert_to<std::uint64_t>();
            std::vector<BigInt> all(k, BigInt(0));
            for (std::uint64_t c0 = 0; c0 < k; ++c0) all[c0] = h / k + (c0 < h % k ? 1 : 0);
            t.expect(fit.eps_star ==
                         rt::brute_eps_star_by_class(rt::explicit_histogram(set, k), all, BigInt(set.size())),
                     "brute " + window(1, m, k));
            if (h <= 2000) t.expect(fit.eps_star == rt::brute_eps_star(set, h, k), "levelwise " + window(1, m, k));
        }
    }
}

void afp_control(Tally& t) {
    const auto odometer = OdometerSpec::periodic(4, {4});
    const auto p = build_afp(odometer);
    const auto target = Supernatural::parse("2^inf");
    t.expect(p.target && *p.target == target, "declared target");

    std::vector<IsoScheduleRow> rows;
    for (Stage l = 0; l <= 2; ++l) rows.push_back({l, Rational(1, 10), {height(p.spec, 3)}, 3, 8});
    const auto verdict =
        check_isomorphic_to_odometer(p.spec, target, rows, {target.prime_power_ladder(16), Rational(1, 100), 3, 8});
    t.expect(verdict.passed(), "isomorphism verdict " + to_string(verdict.status));

    for (unsigned a = 1; a <= 3; ++a) {
        const BigInt k = pow_big(4, a);
        for (Stage m = a; m <= 8; ++m) {
            for (Stage n = m; n <= 8; ++n) t.expect(cyclic_discrepancy(p.spec, m, n, k).delta == 0, window(m, n, k));
        }
    }

    for (Stage m = 3; m <= 7; ++m) {
        // sum_{j>=m} 1/4^{j+1} = 1/(3 * 4^m)
        const Rational tail(BigInt(1), 3 * pow_big(4, static_cast<unsigned>(m)));
        Rational partial = 0;
        for (Stage j = m; j < m + 40; ++j) partial += Rational(BigInt(1), odometer.modulus(j));
        t.expect(partial < tail, "tail closed form");
        for (Stage l = 0; l <= 2; ++l) {
            const auto fit = symmetric_difference_fit(p.spec, l, m, height(p.spec, m));
            t.expect(fit.eps_star <= tail, window(l, m, fit.k) + " eps " + to_fraction_string(fit.eps_star));
        }
    }
}

void cyclic_embedding_exactness(Tally& t) {
    const auto spec = build_cyclic_embedding(6).spec;
    for (Stage m = 1; m <= 12; ++m) {
        for (Stage n = m; n <= 12; ++n) t.expect(cyclic_discrepancy(spec, m, n, 6).delta == 0, window(m, n, 6));
    }
    const auto maps = build_approximating_maps(spec, 6, 4, default_schedule(12, 1));
    t.expect(maps.size() == 4, "four maps");
    for (const auto& map : maps) {
        t.expect(map.defect == 0, "defect alpha " + std::to_string(map.alpha));
        t.expect(equivariance_defect(map) == 0, "equivariance alpha " + std::to_string(map.alpha));
    }
}

void total_ergodicity_control(Tally& t) {
    const Rational threshold(1, 10);  // frozen after the oracle run
    const auto rows = total_ergodicity_probe(build_chacon().spec, 12, threshold, 0, 15);
    t.expect(rows.size() == 11, "rows for k = 2..12");
    for (const auto& row : rows) {
        t.expect(row.min_window_delta >= threshold,
                 "k=" + std::to_string(row.k) + " min " + to_fraction_string(row.min_window_delta));
        t.expect(!row.verdict.passed(), "k=" + std::to_string(row.k) + " passed");
    }
}

void odometer_classification(Tally& t) {
    const auto two = supernatural_of(OdometerSpec::periodic(2, {2}), 8);
    const auto four = supernatural_of(OdometerSpec::periodic(4, {4}), 8);
    const auto six = supernatural_of(OdometerSpec::periodic(6, {6}), 8);
    t.expect(two == four, "2^{n+1} vs 4^{n+1}");
    t.expect(four != six, "4^{n+1} vs 6^{n+1}");
    t.expect(odometers_isomorphic(two, four), "isomorphic 2, 4");
    t.expect(!odometers_isomorphic(four, six), "not isomorphic 4, 6");
    t.expect(two.to_string() == "2^inf" && six.to_string() == "2^inf,3^inf", "values");
}

void majority_rule(Tally& t) {
    rt::Rng rng(2024);
    int done = 0;
    while (done < 200) {
        const auto spec = rt::random_table(rng, 6, 4, 4);
        const Stage m = rt::uniform(rng, 1, 6);
        if (height(spec, m) > 10'000) continue;
        const Stage l = rt::uniform(rng, 0, m - 1);
        const std::uint64_t k = rt::uniform(rng, 2, 8);
        const auto fit = symmetric_difference_fit(spec, l, m, k);
        const auto h = height(spec, m).convert_to<std::uint64_t>();
        t.expect(fit.eps_star == rt::brute_eps_star(index_set(spec, l, m).indices, h, k),
                 "instance " + std::to_string(done) + " " + window(l, m, k));
        ++done;
    }
}

void containment_facts(Tally& t) {
    rt::Rng rng(2025);
    for (int trial = 0; trial < 500; ++trial) {
        const auto spec = rt::random_table(rng, 4, 3, 3);
        const Stage depth = rt::uniform(rng, 1, 3);
        auto a = rt::random_level_set(rng, spec, depth, 2);
        if (a.count() == 0) a = LevelSet::levels(spec, depth, {0});
        const auto b = rt::random_level_set(rng, spec, depth, 2);
        const Rational eps(rt::uniform(rng, 1, 19), 20);
        const auto members = a.members();
        const auto parts = rt::uniform(rng, 1, std::min<std::uint64_t>(5, members.size()));
        std::vector<std::vector<BigInt>> split(parts);
        for (std::size_t i = 0; i < members.size(); ++i) split[i < parts ? i : rt::uniform(rng, 0, parts - 1)].push_back(members[i]);
        bool some = false, all = true;
        for (const auto& part : split) {
            const bool in = is_eps_contained(LevelSet::levels(spec, depth, part), b, eps);
            some = some || in;
            all = all && in;
        }
        const bool whole = is_eps_contained(a, b, eps);
        t.expect(!whole || some, "fact 1, trial " + std::to_string(trial));
        t.expect(!all || whole, "fact 2, trial " + std::to_string(trial));

        const auto h = height(spec, depth).convert_to<long long>();
        const long long lo = -members.front().convert_to<long long>();
        const long long hi = h - 1 - members.back().convert_to<long long>();
        const long long shift_by = lo + static_cast<long long>(rt::uniform(rng, 0, hi - lo));
        t.expect(containment_fraction(shift(a, shift_by), shift(b, shift_by)) == containment_fraction(a, b),
                 "fact 3, trial " + std::to_string(trial));
    }
}

void mass_bounds(Tally& t) {
    const auto gapped = build_gapped_pairs().spec;
    const auto dyadic = build_dyadic().spec;
    for (Stage n = 0; n <= 20; ++n) {
        const auto report = mass_check(gapped, n);
        for (std::size_t i = 1; i < report.partial_sums.size(); ++i) {
            t.expect(report.partial_sums[i] >= report.partial_sums[i - 1], "nondecreasing at " + std::to_string(i));
        }
        t.expect(report.total() <= 1, "bounded at N=" + std::to_string(n));
        t.expect(mass_check(dyadic, n).total() == 0, "dyadic N=" + std::to_string(n));
    }
}

void determinism(Tally& t) {
    const auto doc = cli::parse_json_text(R"({
      // one of each kind that has a verdict or a table
      "spec": {"preset": "gapped_pairs"},
      "analyses": [
        {"kind": "cyclic_factor", "k": 8, "eta": "1/100", "start": 3, "depth": 14},
        {"kind": "discrepancy_grid", "k": [3, 4, 5], "start": 2, "depth": 8},
        {"kind": "total_ergodicity_probe", "k_max": 6, "depth": 8},
        {"kind": "symmetric_fit", "l": 1, "m": 6, "k": 8},
        {"kind": "search_odometer", "l_max": 1, "k_budget": 16, "depth": 6},
        {"kind": "approximating_maps", "k": 4, "depth": 10},
        {"kind": "mass_check", "depth": 12},
        {"kind": "index_set", "m": 0, "n": 40}
      ],
      "threads": 4
    })", "determinism");
    const auto config = cli::parse_config(doc);
    const auto first = cli::run(config);
    const auto second = cli::run(config);
    t.expect(cli::emit_json(first) == cli::emit_json(second), "json bytes");
    t.expect(cli::emit_csv(first) == cli::emit_csv(second), "csv bytes");
    auto serial = config;
    serial.threads = 1;
    const auto third = cli::run(serial);
    t.expect(cli::emit_csv(first) == cli::emit_csv(third), "csv bytes across thread counts");
    t.expect(first.analyses.back().error_kind == "SizeLimitExceeded", "error recorded in place");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Tally&)>> criteria[] = {
        {"heights identity of the gapped pairs, n <= 20", heights_identity},
        {"canonical occurrences equal index sets (h_n <= 1e5)", oracle_equivalence},
        {"residue histograms equal explicit counts, k = 2..12", histogram_consistency},
        {"gapped pairs: delta = 0 for k = 2^a", dyadic_factor},
        {"gapped pairs: delta >= 1/4 for odd k", odd_obstruction},
        {"gapped pairs: eps_star >= 1 for k = 4, 8, 16", isomorphism_failure},
        {"afp(4^{n+1}) is isomorphic to 2^inf at depth", afp_control},
        {"cyclic embedding k = 6 is exact", cyclic_embedding_exactness},
        {"chacon: min window delta >= 1/10 for k <= 12", total_ergodicity_control},
        {"supernatural classification", odometer_classification},
        {"majority rule matches brute force on 200 instances", majority_rule},
        {"eps-containment facts on 500 fixtures", containment_facts},
        {"spacer mass partial sums", mass_bounds},
        {"byte-identical reports", determinism},
    };

    int failed = 0;
    int id = 0;
    for (const auto& [name, body] : criteria) {
        ++id;
        Tally tally;
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        try {
            body(tally);
            detail = tally.detail();
        } catch (const std::exception& e) {
            tally.expect(false, "");
            detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !tally.ok();
        std::cout << (tally.ok() ? "PASS" : "FAIL") << "  criterion " << id << ": " << name << " [" << detail << ", "
                  << static_cast<int>(seconds * 1000) << " ms]\n";
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << id - failed << "/" << id << "\n";
    return failed ? 1 : 0;
}
