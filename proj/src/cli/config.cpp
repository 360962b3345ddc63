#include <fstream>
#include <set>
#include <sstream>

#include "rankone/cli.hpp"
#include "rankone/error.hpp"

namespace rankone::cli {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::ConfigInvalid, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::uint64_t as_count(const Json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    if (v.is_string()) {
        try {
            return to_u64(parse_bigint(v.get<std::string>()), path);
        } catch (const Error& e) {
            invalid(path, e.what());
        }
    }
    invalid(path, "expected a nonnegative integer");
}

BigInt as_big(const Json& v, const std::string& path) {
    if (v.is_number_unsigned()) return BigInt(v.get<std::uint64_t>());
    if (v.is_number_integer()) return BigInt(v.get<std::int64_t>());
    if (v.is_string()) {
        try {
            return parse_bigint(v.get<std::string>());
        } catch (const Error& e) {
            invalid(path, e.what());
        }
    }
    invalid(path, "expected an integer or an integer string");
}

Rational as_rational(const Json& v, const std::string& path) {
    if (v.is_number_integer()) return Rational(as_big(v, path));
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const Error& e) {
            invalid(path, e.what());
        }
    }
    if (v.is_number_float()) invalid(path, "floats are not exact; write \"p/q\"");
    invalid(path, "expected a rational \"p/q\"");
}

const Json& as_array(const Json& v, const std::string& path) {
    if (!v.is_array()) invalid(path, "expected a list");
    return v;
}

// Reads one JSON object field by field into its canonical form and rejects
// keys nobody asked for.
class Fields {
public:
    Fields(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)), out_(Json::object()) {
        if (!obj_.is_object()) invalid(path_.empty() ? "config" : path_, "expected an object");
    }

    const Json* raw(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback) {
        const Json* v = raw(key);
        if (!v && !fallback) invalid(path(key), "required");
        const auto x = v ? as_count(*v, path(key)) : *fallback;
        out_[key] = x;
        return x;
    }

    BigInt big(const std::string& key, std::optional<BigInt> fallback) {
        const Json* v = raw(key);
        if (!v && !fallback) invalid(path(key), "required");
        BigInt x = v ? as_big(*v, path(key)) : *fallback;
        out_[key] = to_string(x);
        return x;
    }

    Rational rational(const std::string& key, std::optional<Rational> fallback) {
        const Json* v = raw(key);
        if (!v && !fallback) invalid(path(key), "required");
        Rational x = v ? as_rational(*v, path(key)) : *fallback;
        out_[key] = to_fraction_string(x);
        return x;
    }

    std::vector<BigInt> bigs(const std::string& key, std::optional<std::vector<BigInt>> fallback) {
        const Json* v = raw(key);
        if (!v && !fallback) invalid(path(key), "required");
        std::vector<BigInt> xs;
        if (v) {
            const auto& list = as_array(*v, path(key));
            for (std::size_t i = 0; i < list.size(); ++i) xs.push_back(as_big(list[i], at(path(key), i)));
        } else {
            xs = *fallback;
        }
        Json arr = Json::array();
        for (const auto& x : xs) arr.push_back(to_string(x));
        out_[key] = arr;
        return xs;
    }

    std::vector<Rational> rationals(const std::string& key, std::optional<std::vector<Rational>> fallback) {
        const Json* v = raw(key);
        if (!v && !fallback) invalid(path(key), "required");
        std::vector<Rational> xs;
        if (v) {
            const auto& list = as_array(*v, path(key));
            for (std::size_t i = 0; i < list.size(); ++i) xs.push_back(as_rational(list[i], at(path(key), i)));
        } else {
            xs = *fallback;
        }
        Json arr = Json::array();
        for (const auto& x : xs) arr.push_back(to_fraction_string(x));
        out_[key] = arr;
        return xs;
    }

    std::vector<std::uint64_t> counts(const std::string& key, std::optional<std::vector<std::uint64_t>> fallback) {
        const Json* v = raw(key);
        if (!v && !fallback) invalid(path(key), "required");
        std::vector<std::uint64_t> xs;
        if (v) {
            const auto& list = as_array(*v, path(key));
            for (std::size_t i = 0; i < list.size(); ++i) xs.push_back(as_count(list[i], at(path(key), i)));
        } else {
            xs = *fallback;
        }
        out_[key] = xs;
        return xs;
    }

    std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
        const Json* v = raw(key);
        std::string x = fallback;
        if (v) {
            if (!v->is_string()) invalid(path(key), "expected a string");
            x = v->get<std::string>();
        }
        if (std::find(allowed.begin(), allowed.end(), x) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            invalid(path(key), "'" + x + "' is not one of " + list);
        }
        out_[key] = x;
        return x;
    }

    void set(const std::string& key, Json value) { out_[key] = std::move(value); }

    Json finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) invalid(path(it.key()), "unknown key");
        }
        return std::move(out_);
    }

private:
    const Json& obj_;
    std::string path_;
    Json out_;
    std::set<std::string> seen_;
};

Json canonical_stage(const Json& stage, const std::string& path) {
    Json out = Json::object();
    if (stage.is_array()) {
        std::vector<BigInt> counts;
        for (std::size_t i = 0; i < stage.size(); ++i) counts.push_back(as_big(stage[i], at(path, i)));
        const auto p = StageParams::dense(counts);
        out["cuts"] = to_string(p.cuts);
        Json spacers = Json::array();
        for (const auto& [col, cnt] : p.spacers) spacers.push_back({to_string(col), to_string(cnt)});
        out["spacers"] = spacers;
        return out;
    }
    Fields f(stage, path);
    f.big("cuts", std::nullopt);
    const Json* sp = f.raw("spacers");
    Json spacers = Json::array();
    if (sp) {
        const auto& list = as_array(*sp, f.path("spacers"));
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto p = at(f.path("spacers"), i);
            if (!list[i].is_array() || list[i].size() != 2) invalid(p, "expected [column, count]");
            spacers.push_back({to_string(as_big(list[i][0], p + "[0]")), to_string(as_big(list[i][1], p + "[1]"))});
        }
    }
    f.set("spacers", spacers);
    return f.finish();
}

Json canonical_spec(const Json& doc) {
    Fields f(doc, "spec");
    const Json* preset = f.raw("preset");
    const Json* table = f.raw("table");
    const Json* periodic = f.raw("periodic");
    const int given = (preset != nullptr) + (table != nullptr) + (periodic != nullptr);
    if (given != 1) invalid("spec", "give exactly one of preset, table, periodic");
    if (preset) {
        if (!preset->is_string()) invalid("spec.preset", "expected a name");
        f.set("preset", *preset);
        Json params = Json::object();
        if (const Json* p = f.raw("params")) {
            if (!p->is_object()) invalid("spec.params", "expected an object");
            for (auto it = p->begin(); it != p->end(); ++it) {
                const auto& v = it.value();
                if (v.is_string()) {
                    params[it.key()] = v;
                } else if (v.is_boolean()) {
                    params[it.key()] = v.get<bool>() ? "true" : "false";
                } else if (v.is_number_integer()) {
                    params[it.key()] = v.dump();
                } else if (v.is_array()) {
                    std::string csv;
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        csv += (i ? "," : "") + to_string(as_big(v[i], at("spec.params." + it.key(), i)));
                    }
                    params[it.key()] = csv;
                } else {
                    invalid("spec.params." + it.key(), "expected a string, integer, boolean or integer list");
                }
            }
        }
        f.set("params", params);
    } else {
        const std::string key = table ? "table" : "periodic";
        const auto& list = as_array(table ? *table : *periodic, "spec." + key);
        if (list.empty()) invalid("spec." + key, "needs at least one stage");
        Json stages = Json::array();
        for (std::size_t i = 0; i < list.size(); ++i) stages.push_back(canonical_stage(list[i], at("spec." + key, i)));
        f.set(key, stages);
    }
    if (const Json* t = f.raw("target")) {
        if (!t->is_string()) invalid("spec.target", "expected a supernatural such as \"2^inf\"");
        try {
            f.set("target", Supernatural::parse(t->get<std::string>()).to_string());
        } catch (const Error& e) {
            invalid("spec.target", e.what());
        }
    }
    return f.finish();
}

Supernatural target_of(Fields& f, const std::optional<Supernatural>& declared) {
    const Json* t = f.raw("target");
    Supernatural target;
    if (t) {
        if (!t->is_string()) invalid(f.path("target"), "expected a supernatural such as \"2^inf\"");
        try {
            target = Supernatural::parse(t->get<std::string>());
        } catch (const Error& e) {
            invalid(f.path("target"), e.what());
        }
    } else if (declared) {
        target = *declared;
    } else {
        invalid(f.path("target"), "required: the spec declares no target");
    }
    f.set("target", target.to_string());
    return target;
}

std::vector<BigInt> default_probes(const Supernatural& target) { return target.prime_power_ladder(16); }

Json canonical_odometer(const Json& doc, const std::string& path) {
    Fields f(doc, path);
    const bool base = f.raw("base") != nullptr;
    const bool moduli = f.raw("moduli") != nullptr;
    const bool first = f.raw("first") != nullptr;
    if (base + moduli + first != 1) invalid(path, "give exactly one of base, moduli, first (with multipliers)");
    if (base) f.big("base", std::nullopt);
    if (moduli) f.bigs("moduli", std::nullopt);
    if (first) {
        f.big("first", std::nullopt);
        f.bigs("multipliers", std::nullopt);
    }
    return f.finish();
}

Json canonical_analysis(const Json& doc, const std::string& path, const std::optional<Supernatural>& declared,
                        std::string& kind) {
    Fields f(doc, path);
    const Json* k = f.raw("kind");
    if (!k || !k->is_string()) invalid(f.path("kind"), "required analysis kind");
    kind = k->get<std::string>();
    const auto kinds = analysis_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) invalid(f.path("kind"), "unknown kind '" + kind + "'");

    const Rational tenth(1, 10);
    if (kind == "heights" || kind == "mass_check") {
        f.count("depth", 10);
    } else if (kind == "word") {
        f.count("from", 0);
        f.count("to", 3);
    } else if (kind == "index_set") {
        f.count("m", 0);
        f.count("n", 2);
    } else if (kind == "residue_histogram") {
        f.count("m", 0);
        f.count("n", 2);
        f.count("k", 2);
    } else if (kind == "discrepancy_grid") {
        f.bigs("k", std::vector<BigInt>{2});
        f.count("start", 0);
        f.count("depth", 8);
    } else if (kind == "cyclic_factor") {
        f.big("k", BigInt(2));
        f.rational("eta", tenth);
        f.count("start", 0);
        f.count("depth", 10);
    } else if (kind == "summability") {
        f.big("k", BigInt(2));
        f.counts("q", std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
        f.choice("reading", to_string(SummabilityReading::OffClassOverWindow),
                 {to_string(SummabilityReading::OffClassOverWindow), to_string(SummabilityReading::LiteralZeroClass)});
    } else if (kind == "total_ergodicity_probe") {
        f.count("k_max", 12);
        f.rational("eta", tenth);
        f.count("start", 0);
        f.count("depth", 10);
    } else if (kind == "odometer_factor") {
        const auto target = target_of(f, declared);
        f.bigs("probes", default_probes(target));
        f.rational("eta", tenth);
        f.count("start", 0);
        f.count("depth", 10);
    } else if (kind == "symmetric_fit") {
        f.count("l", 0);
        f.count("m", 4);
        f.big("k", BigInt(2));
    } else if (kind == "isomorphism") {
        const auto target = target_of(f, declared);
        const Json* rows = f.raw("rows");
        if (!rows) invalid(f.path("rows"), "required schedule rows");
        const auto& list = as_array(*rows, f.path("rows"));
        Json out = Json::array();
        for (std::size_t i = 0; i < list.size(); ++i) {
            Fields row(list[i], at(f.path("rows"), i));
            row.count("l", std::nullopt);
            row.rational("eps", std::nullopt);
            row.bigs("k_candidates", std::nullopt);
            row.count("start", 0);
            row.count("depth", 8);
            out.push_back(row.finish());
        }
        f.set("rows", out);
        const Json empty = Json::object();
        const Json* factor = f.raw("factor");
        Fields fac(factor ? *factor : empty, f.path("factor"));
        fac.bigs("probes", default_probes(target));
        fac.rational("eta", Rational(1, 100));
        fac.count("start", 0);
        fac.count("depth", 8);
        f.set("factor", fac.finish());
    } else if (kind == "search_odometer") {
        f.count("l_max", 2);
        f.rationals("eps", std::vector<Rational>{tenth});
        f.count("k_budget", 64);
        f.rational("eta", tenth);
        f.count("start", 1);
        f.count("depth", 8);
    } else if (kind == "approximating_maps") {
        f.count("k", 2);
        f.count("alpha_max", 3);
        f.count("start", 0);
        f.count("depth", 12);
    } else if (kind == "supernatural") {
        const Json* od = f.raw("odometer");
        if (!od) invalid(f.path("odometer"), "required");
        f.set("odometer", canonical_odometer(*od, f.path("odometer")));
        if (const Json* cmp = f.raw("compare")) f.set("compare", canonical_odometer(*cmp, f.path("compare")));
        f.count("probe_depth", 8);
    }
    f.set("kind", kind);
    return f.finish();
}

}  // namespace

std::vector<std::string> analysis_kinds() {
    return {"heights",          "word",           "index_set",          "residue_histogram",
            "mass_check",       "discrepancy_grid", "cyclic_factor",    "summability",
            "total_ergodicity_probe", "odometer_factor", "symmetric_fit", "isomorphism",
            "search_odometer",  "approximating_maps", "supernatural"};
}

RunConfig parse_config(const Json& doc) {
    Fields f(doc, "");
    RunConfig config;
    const Json* spec = f.raw("spec");
    if (!spec) invalid("spec", "required");
    config.spec = canonical_spec(*spec);

    std::optional<Supernatural> declared;
    try {
        declared = build_preset(config.spec).target;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigInvalid) throw;
        invalid("spec", e.what());
    }

    if (const Json* analyses = f.raw("analyses")) {
        const auto& list = as_array(*analyses, "analyses");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Analysis a;
            a.params = canonical_analysis(list[i], at("analyses", i), declared, a.kind);
            config.analyses.push_back(std::move(a));
        }
    }

    const Json empty = Json::object();
    const Json* limits = f.raw("limits");
    Fields lim(limits ? *limits : empty, "limits");
    config.limits.size_limit = lim.count("size_limit", kDefaultSizeLimit);
    config.limits.word_limit = lim.count("word_limit", Limits{}.word_limit);
    lim.finish();

    const Json* threads = f.raw("threads");
    config.threads = threads ? static_cast<unsigned>(as_count(*threads, "threads")) : 1;
    if (config.threads == 0) invalid("threads", "must be at least 1");

    const Json* output = f.raw("output");
    Fields out(output ? *output : empty, "output");
    if (const Json* dir = out.raw("dir")) {
        if (!dir->is_string()) invalid("output.dir", "expected a path");
        config.out_dir = dir->get<std::string>();
    }
    if (const Json* formats = out.raw("formats")) {
        const auto& list = as_array(*formats, "output.formats");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto p = at("output.formats", i);
            if (!list[i].is_string()) invalid(p, "expected json, csv or text");
            const auto name = list[i].get<std::string>();
            if (name != "json" && name != "csv" && name != "text") invalid(p, "'" + name + "' is not json, csv or text");
            config.formats.push_back(name);
        }
    } else {
        config.formats = {"json"};
    }
    out.finish();
    f.finish();
    return config;
}

Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::ConfigInvalid, origin + ": " + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(parse_json_text(buf.str(), path.string()));
}

Json echo(const RunConfig& config) {
    Json doc = Json::object();
    doc["spec"] = config.spec;
    Json analyses = Json::array();
    for (const auto& a : config.analyses) analyses.push_back(a.params);
    doc["analyses"] = analyses;
    doc["limits"] = {{"size_limit", config.limits.size_limit}, {"word_limit", config.limits.word_limit}};
    doc["threads"] = config.threads;
    Json output = {{"formats", config.formats}};
    if (!config.out_dir.empty()) output["dir"] = config.out_dir;
    doc["output"] = output;
    return doc;
}

void apply_depth_override(RunConfig& config, Stage depth) {
    for (auto& a : config.analyses) {
        auto& p = a.params;
        if (p.contains("depth")) p["depth"] = depth;
        if (p.contains("rows")) {
            for (auto& row : p["rows"]) row["depth"] = depth;
        }
        if (p.contains("factor")) p["factor"]["depth"] = depth;
    }
}

}  // namespace rankone::cli
