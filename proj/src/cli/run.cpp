#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "rankone/cli.hpp"
#include "rankone/error.hpp"
#include "rankone/measure.hpp"
#include "rankone/words.hpp"

#ifndef RANKONE_VERSION
#define RANKONE_VERSION "0.0.0"
#endif

namespace rankone::cli {

namespace {

// Canonical params are already validated; these only unpack them.
std::uint64_t count(const Json& p, const char* key) { return p.at(key).get<std::uint64_t>(); }
BigInt big(const Json& p, const char* key) { return parse_bigint(p.at(key).get<std::string>()); }
Rational rational(const Json& p, const char* key) { return parse_rational(p.at(key).get<std::string>()); }

std::vector<BigInt> bigs(const Json& p, const char* key) {
    std::vector<BigInt> xs;
    for (const auto& v : p.at(key)) xs.push_back(parse_bigint(v.get<std::string>()));
    return xs;
}

std::string approx(const Rational& q) {
    std::ostringstream s;
    s << "~" << approximate(q);
    return s.str();
}

Json to_json(const CyclicDiscrepancy& w) {
    return {{"m", w.m},
            {"n", w.n},
            {"k", to_string(w.k)},
            {"best_j", to_string(w.best_j)},
            {"delta", to_fraction_string(w.delta)},
            {"method", w.method}};
}

Json to_json(const SymmetricDifferenceFit& f) {
    Json j = {{"l", f.l},
              {"m", f.m},
              {"k", to_string(f.k)},
              {"d_size", to_string(f.d_size)},
              {"eps_star", to_fraction_string(f.eps_star)},
              {"method", f.method}};
    if (f.best_d) {
        Json d = Json::array();
        for (const auto& c : *f.best_d) d.push_back(to_string(c));
        j["best_d"] = d;
    } else {
        j["best_d"] = nullptr;
    }
    return j;
}

Json to_json(const CriterionVerdict& v) {
    Json windows = Json::array();
    for (const auto& w : v.windows) windows.push_back(to_json(w));
    Json fits = Json::array();
    for (const auto& f : v.fits) fits.push_back(to_json(f));
    Json profile = Json::array();
    for (const auto& [start, delta] : v.profile) profile.push_back({start, to_fraction_string(delta)});
    Json parts = Json::array();
    for (const auto& p : v.parts) parts.push_back(to_json(p));
    return {{"status", to_string(v.status)},
            {"criterion", v.criterion},
            {"depth", v.depth},
            {"zero_evidence", v.zero_evidence},
            {"windows", windows},
            {"fits", fits},
            {"profile", profile},
            {"parts", parts},
            {"notes", v.notes}};
}

void collect_windows(const CriterionVerdict& v, std::vector<CyclicDiscrepancy>& out) {
    out.insert(out.end(), v.windows.begin(), v.windows.end());
    for (const auto& p : v.parts) collect_windows(p, out);
}

std::string verdict_line(const CriterionVerdict& v) {
    std::string line = v.criterion + ": " + to_string(v.status) + " (depth " + std::to_string(v.depth) + ")";
    if (v.zero_evidence) line += ", zero evidence";
    return line;
}

OdometerSpec odometer_from(const Json& p) {
    if (p.contains("base")) {
        const BigInt b = big(p, "base");
        return OdometerSpec::periodic(b, {b});
    }
    if (p.contains("moduli")) return OdometerSpec::explicit_list(bigs(p, "moduli"));
    return OdometerSpec::periodic(big(p, "first"), bigs(p, "multipliers"));
}

Json supernatural_json(const Supernatural& s) {
    Json j = {{"value", s.to_string()}, {"truncated", s.truncated()}};
    j["truncated_depth"] = s.truncated_depth() ? Json(*s.truncated_depth()) : Json(nullptr);
    return j;
}

void execute(const Preset& preset, const Limits& limits, AnalysisRecord& rec) {
    const auto& p = rec.params;
    const auto& spec = preset.spec;
    const auto& kind = rec.kind;
    Json r = Json::object();

    if (kind == "heights") {
        Json hs = Json::array();
        for (Stage n = 0; n <= count(p, "depth"); ++n) hs.push_back(to_string(preset.verified_height(n)));
        r["heights"] = hs;
        r["identity_checked"] = static_cast<bool>(preset.height_identity);
        rec.summary.push_back("h_" + std::to_string(count(p, "depth")) + " = " + hs.back().get<std::string>());
    } else if (kind == "word") {
        Json words = Json::array();
        for (Stage n = count(p, "from"); n <= count(p, "to"); ++n) {
            auto w = generate_word(spec, n, limits.word_limit);
            words.push_back({{"stage", n}, {"symbols", w.symbols}});
            rec.summary.push_back("v_" + std::to_string(n) + " = " + w.symbols);
        }
        r["words"] = words;
    } else if (kind == "index_set") {
        const auto set = index_set(spec, count(p, "m"), count(p, "n"), limits.size_limit);
        Json xs = Json::array();
        for (const auto& i : set.indices) xs.push_back(to_string(i));
        r["indices"] = xs;
        rec.summary.push_back("|I| = " + std::to_string(set.indices.size()));
    } else if (kind == "residue_histogram") {
        const auto h = residue_histogram(spec, count(p, "m"), count(p, "n"), count(p, "k"));
        Json cs = Json::array();
        for (const auto& c : h.counts) cs.push_back(to_string(c));
        r["counts"] = cs;
        r["total"] = to_string(h.total);
        rec.summary.push_back("total " + to_string(h.total));
    } else if (kind == "mass_check") {
        const auto m = mass_check(spec, count(p, "depth"));
        Json terms = Json::array(), sums = Json::array();
        for (const auto& t : m.terms) terms.push_back(to_fraction_string(t));
        for (const auto& s : m.partial_sums) sums.push_back(to_fraction_string(s));
        r["terms"] = terms;
        r["partial_sums"] = sums;
        r["total"] = to_fraction_string(m.total());
        rec.summary.push_back("spacer mass " + to_fraction_string(m.total()) + " " + approx(m.total()));
    } else if (kind == "discrepancy_grid") {
        const Stage start = count(p, "start"), depth = count(p, "depth");
        Json windows = Json::array();
        for (const auto& k : bigs(p, "k")) {
            Rational worst = 0;
            for (Stage m = start; m <= depth; ++m) {
                for (Stage n = m; n <= depth; ++n) {
                    rec.grid.push_back(cyclic_discrepancy(spec, m, n, k, limits.size_limit));
                    windows.push_back(to_json(rec.grid.back()));
                    worst = std::max(worst, rec.grid.back().delta);
                }
            }
            rec.summary.push_back("k = " + to_string(k) + ": max delta " + to_fraction_string(worst) + " " +
                                  approx(worst));
        }
        r["windows"] = windows;
    } else if (kind == "cyclic_factor") {
        const auto v = check_cyclic_factor(spec, big(p, "k"), rational(p, "eta"), count(p, "start"), count(p, "depth"));
        r = to_json(v);
        collect_windows(v, rec.grid);
        rec.summary.push_back(verdict_line(v));
    } else if (kind == "summability") {
        std::vector<Stage> q;
        for (const auto& v : p.at("q")) q.push_back(v.get<std::uint64_t>());
        const auto reading = p.at("reading").get<std::string>() == to_string(SummabilityReading::LiteralZeroClass)
                                 ? SummabilityReading::LiteralZeroClass
                                 : SummabilityReading::OffClassOverWindow;
        const auto s = summability_profile(spec, big(p, "k"), q, reading);
        Json terms = Json::array(), sums = Json::array();
        for (const auto& t : s.terms) terms.push_back(to_fraction_string(t));
        for (const auto& t : s.partial_sums) sums.push_back(to_fraction_string(t));
        r["terms"] = terms;
        r["partial_sums"] = sums;
        r["reading"] = to_string(s.reading);
        if (!s.partial_sums.empty()) {
            rec.summary.push_back("partial sum " + to_fraction_string(s.partial_sums.back()) + " " +
                                  approx(s.partial_sums.back()));
        }
    } else if (kind == "total_ergodicity_probe") {
        const auto rows = total_ergodicity_probe(spec, count(p, "k_max"), rational(p, "eta"), count(p, "start"),
                                                 count(p, "depth"));
        Json out = Json::array();
        for (const auto& row : rows) {
            out.push_back({{"k", row.k},
                           {"status", to_string(row.verdict.status)},
                           {"min_window_delta", to_fraction_string(row.min_window_delta)},
                           {"min_window", to_json(row.min_window)}});
            collect_windows(row.verdict, rec.grid);
            rec.summary.push_back("k = " + std::to_string(row.k) + ": " + to_string(row.verdict.status) +
                                  ", min window delta " + to_fraction_string(row.min_window_delta) + " " +
                                  approx(row.min_window_delta));
        }
        r["rows"] = out;
    } else if (kind == "odometer_factor") {
        const auto v = check_odometer_factor(spec, Supernatural::parse(p.at("target").get<std::string>()),
                                             bigs(p, "probes"), rational(p, "eta"), count(p, "start"),
                                             count(p, "depth"));
        r = to_json(v);
        collect_windows(v, rec.grid);
        rec.summary.push_back(verdict_line(v));
    } else if (kind == "symmetric_fit") {
        const auto f = symmetric_difference_fit(spec, count(p, "l"), count(p, "m"), big(p, "k"), limits.size_limit);
        r = to_json(f);
        rec.summary.push_back("eps_star " + to_fraction_string(f.eps_star) + " " + approx(f.eps_star) + " via " +
                              f.method);
    } else if (kind == "isomorphism") {
        std::vector<IsoScheduleRow> rows;
        for (const auto& row : p.at("rows")) {
            rows.push_back({count(row, "l"), rational(row, "eps"), bigs(row, "k_candidates"), count(row, "start"),
                            count(row, "depth")});
        }
        const auto& fac = p.at("factor");
        const FactorProbes factor{bigs(fac, "probes"), rational(fac, "eta"), count(fac, "start"), count(fac, "depth")};
        const auto v = check_isomorphic_to_odometer(spec, Supernatural::parse(p.at("target").get<std::string>()),
                                                    rows, factor);
        r = to_json(v);
        collect_windows(v, rec.grid);
        rec.summary.push_back(verdict_line(v));
    } else if (kind == "search_odometer") {
        SearchOptions opts;
        opts.l_max = count(p, "l_max");
        for (const auto& e : p.at("eps")) opts.eps.push_back(parse_rational(e.get<std::string>()));
        opts.k_budget = count(p, "k_budget");
        opts.eta = rational(p, "eta");
        opts.start = count(p, "start");
        opts.depth = count(p, "depth");
        const auto s = search_some_odometer(spec, opts);
        r["verdict"] = to_json(s.verdict);
        r["candidate"] = s.candidate ? supernatural_json(*s.candidate) : Json(nullptr);
        Json ws = Json::array();
        for (const auto& [key, k] : s.witnesses) {
            ws.push_back({{"l", key.first}, {"eps", to_fraction_string(key.second)}, {"k", to_string(k)}});
        }
        r["witnesses"] = ws;
        collect_windows(s.verdict, rec.grid);
        rec.summary.push_back(verdict_line(s.verdict));
        if (s.candidate) rec.summary.push_back("candidate " + s.candidate->to_string());
    } else if (kind == "approximating_maps") {
        const auto maps = build_approximating_maps(spec, count(p, "k"), count(p, "alpha_max"),
                                                   default_schedule(count(p, "depth"), count(p, "start")));
        Json out = Json::array();
        for (const auto& m : maps) {
            const auto equivariance = equivariance_defect(m, limits.size_limit);
            out.push_back({{"alpha", m.alpha},
                           {"stage", m.stage},
                           {"next_stage", m.next_stage},
                           {"step", m.step},
                           {"offset", m.offset},
                           {"eta", to_fraction_string(m.eta)},
                           {"mass_fraction", to_fraction_string(m.mass_fraction)},
                           {"defect", to_fraction_string(m.defect)},
                           {"equivariance_defect", to_fraction_string(equivariance)}});
            rec.summary.push_back("alpha " + std::to_string(m.alpha) + ": N = " + std::to_string(m.stage) +
                                  ", defect " + to_fraction_string(m.defect) + " " + approx(m.defect));
        }
        r["maps"] = out;
    } else if (kind == "supernatural") {
        const auto depth = count(p, "probe_depth");
        const auto a = supernatural_of(odometer_from(p.at("odometer")), depth);
        r["odometer"] = supernatural_json(a);
        rec.summary.push_back("K = " + a.to_string() + (a.truncated() ? " (truncated)" : ""));
        if (p.contains("compare")) {
            const auto b = supernatural_of(odometer_from(p.at("compare")), depth);
            r["compare"] = supernatural_json(b);
            const bool iso = odometers_isomorphic(a, b);
            r["isomorphic"] = iso;
            rec.summary.push_back(std::string(iso ? "isomorphic to " : "not isomorphic to ") + b.to_string());
        }
    } else {
        throw Error(ErrorKind::ConfigInvalid, "unknown analysis kind '" + kind + "'");
    }
    rec.result = std::move(r);
}

}  // namespace

bool Report::any_error() const {
    return std::any_of(analyses.begin(), analyses.end(), [](const auto& a) { return a.error_kind.has_value(); });
}

std::string tool_version() { return RANKONE_VERSION; }

Preset build_preset(const Json& source) {
    std::optional<Preset> preset;
    if (source.contains("preset")) {
        std::map<std::string, std::string> params;
        for (auto it = source.at("params").begin(); it != source.at("params").end(); ++it) {
            params[it.key()] = it.value().get<std::string>();
        }
        preset = preset_by_name(source.at("preset").get<std::string>(), params);
    } else {
        const bool table = source.contains("table");
        std::vector<StageParams> stages;
        for (const auto& s : source.at(table ? "table" : "periodic")) {
            std::vector<std::pair<BigInt, BigInt>> spacers;
            for (const auto& sp : s.at("spacers")) {
                spacers.emplace_back(parse_bigint(sp[0].get<std::string>()), parse_bigint(sp[1].get<std::string>()));
            }
            stages.push_back(StageParams::sparse(big(s, "cuts"), std::move(spacers)));
        }
        preset.emplace(table ? "table" : "periodic",
                       table ? RankOneSpec::table(std::move(stages)) : RankOneSpec::periodic(std::move(stages)));
    }
    if (source.contains("target")) preset->target = Supernatural::parse(source.at("target").get<std::string>());
    return std::move(*preset);
}

Report run(const RunConfig& config) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    Report report;
    report.config = echo(config);
    report.tool_version = tool_version();
    report.analyses.resize(config.analyses.size());
    for (std::size_t i = 0; i < config.analyses.size(); ++i) {
        report.analyses[i].index = i;
        report.analyses[i].kind = config.analyses[i].kind;
        report.analyses[i].params = config.analyses[i].params;
    }

    const Preset preset = build_preset(config.spec);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < report.analyses.size();) {
            auto& rec = report.analyses[i];
            const auto start = Clock::now();
            try {
                execute(preset, config.limits, rec);
            } catch (const Error& e) {
                rec.result = nullptr;
                rec.error_kind = std::string(to_string(e.kind()));
                rec.error_message = e.what();
            } catch (const std::exception& e) {
                rec.result = nullptr;
                rec.error_kind = "InternalError";
                rec.error_message = e.what();
            }
            rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        }
    };
    const std::size_t helpers =
        std::min<std::size_t>(std::max(config.threads, 1u), std::max<std::size_t>(report.analyses.size(), 1)) - 1;
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < helpers; ++t) pool.emplace_back(worker);
        worker();
    }
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return report;
}

}  // namespace rankone::cli
