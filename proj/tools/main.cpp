// rankone: batch analyses of rank-one constructions.
//
//   rankone analyze --config run.json --out results --format json --format csv
//   rankone check-cyclic --preset gapped_pairs --k 8 --eta 1/100 --start 3 --depth 14
//   rankone word --preset cyclic_embedding --set k=3 --arg to=4

#include <CLI11.hpp>

#include <iostream>

#include "rankone/cli.hpp"
#include "rankone/error.hpp"

namespace {

using rankone::cli::Json;

constexpr int kExitConfig = 2;
constexpr int kExitAnalysis = 3;

struct Quick {
    std::string preset = "chacon";
    std::vector<std::string> sets;
    std::vector<std::string> args;
    std::string k, eta, start, depth, target;
};

std::pair<std::string, std::string> split_assignment(const std::string& s, const std::string& flag) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw rankone::Error(rankone::ErrorKind::ConfigInvalid, flag + " expects key=value, got '" + s + "'");
    }
    return {s.substr(0, eq), s.substr(eq + 1)};
}

// Values that parse as JSON keep their type ("[4,16]", "3"); anything else is a string.
Json loose_value(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        return text;
    }
}

Json quick_config(const std::string& kind, const Quick& q) {
    Json params = Json::object();
    for (const auto& s : q.sets) {
        auto [key, value] = split_assignment(s, "--set");
        params[key] = value;
    }
    Json analysis = {{"kind", kind}};
    for (const auto& a : q.args) {
        auto [key, value] = split_assignment(a, "--arg");
        analysis[key] = loose_value(value);
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"k", &q.k}, {"eta", &q.eta}, {"start", &q.start}, {"depth", &q.depth}, {"target", &q.target}};
    for (const auto& [key, value] : flags) {
        if (!value->empty()) analysis[key] = loose_value(*value);
    }
    if (analysis.contains("eta") && analysis["eta"].is_number()) analysis["eta"] = q.eta;
    return {{"spec", {{"preset", q.preset}, {"params", params}}}, {"analyses", Json::array({analysis})}};
}

std::string render(const rankone::cli::Report& report, const std::string& format) {
    if (format == "csv") return rankone::cli::emit_csv(report);
    if (format == "text") return rankone::cli::emit_text(report);
    return rankone::cli::emit_json(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-depth analyses of rank-one cutting-and-stacking constructions"};
    app.set_version_flag("--version", rankone::cli::tool_version());
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> formats;
    unsigned threads = 0;
    long long depth_override = -1;

    auto output_options = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "Directory for report files");
        sub->add_option("--format", formats, "json, csv or text (repeatable)")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--threads", threads, "Concurrent analyses")->check(CLI::PositiveNumber);
        sub->add_option("--depth-override", depth_override, "Replace every depth in the analyses")
            ->check(CLI::NonNegativeNumber);
    };

    auto* analyze = app.add_subcommand("analyze", "Run every analysis of a config file");
    analyze->add_option("--config", config_path, "Run config (JSON, comments allowed)")->required();
    output_options(analyze);

    Quick quick;
    struct Shortcut {
        const char* name;
        const char* kind;
        const char* help;
    };
    const Shortcut shortcuts[] = {
        {"word", "word", "Print the words v_n, one line per stage"},
        {"heights", "heights", "Tower heights with their closed forms checked"},
        {"probe-te", "total_ergodicity_probe", "Cyclic discrepancy table over k <= k_max"},
        {"check-cyclic", "cyclic_factor", "Finite-depth cyclic factor check for one k"},
        {"check-odometer", "odometer_factor", "Cyclic factor checks over probes of a target odometer"},
        {"check-iso", "isomorphism", "Isomorphism-to-odometer check (rows via --arg rows=[...])"},
        {"search-odometer", "search_odometer", "Search for an odometer the construction fits"},
    };
    std::vector<std::pair<CLI::App*, std::string>> quick_subs;
    for (const auto& s : shortcuts) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--preset", quick.preset, "Preset name")->capture_default_str();
        sub->add_option("--set", quick.sets, "Preset parameter key=value (repeatable)");
        sub->add_option("--arg", quick.args, "Analysis parameter key=value (repeatable)");
        sub->add_option("--k", quick.k, "Modulus");
        sub->add_option("--eta", quick.eta, "Threshold as p/q");
        sub->add_option("--start", quick.start, "First stage N");
        sub->add_option("--depth", quick.depth, "Deepest stage");
        sub->add_option("--target", quick.target, "Target supernatural, e.g. 2^inf");
        output_options(sub);
        quick_subs.emplace_back(sub, s.kind);
    }

    CLI11_PARSE(app, argc, argv);

    rankone::cli::RunConfig config;
    std::string kind;
    try {
        if (analyze->parsed()) {
            config = rankone::cli::load_config(config_path);
        } else {
            for (const auto& [sub, k] : quick_subs) {
                if (sub->parsed()) kind = k;
            }
            if (kind == "total_ergodicity_probe" && !quick.k.empty()) {
                quick.args.push_back("k_max=" + quick.k);
                quick.k.clear();
            }
            config = rankone::cli::parse_config(quick_config(kind, quick));
        }
    } catch (const rankone::Error& e) {
        std::cerr << "rankone: " << e.what() << "\n";
        return kExitConfig;
    }

    if (depth_override >= 0) rankone::cli::apply_depth_override(config, static_cast<rankone::Stage>(depth_override));
    if (threads > 0) config.threads = threads;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!formats.empty()) config.formats = formats;

    const auto report = rankone::cli::run(config);
    try {
        if (!config.out_dir.empty()) {
            rankone::cli::write_outputs(report, config.out_dir, config.formats);
        } else if (kind == "word" && formats.empty() && !report.any_error()) {
            for (const auto& w : report.analyses.front().result.at("words")) {
                std::cout << w.at("symbols").get<std::string>() << "\n";
            }
        } else {
            const std::string format = formats.empty() ? (kind.empty() ? "json" : "text") : formats.front();
            std::cout << render(report, format);
        }
    } catch (const rankone::Error& e) {
        std::cerr << "rankone: " << e.what() << "\n";
        return kExitAnalysis;
    }

    for (const auto& a : report.analyses) {
        if (a.error_kind) std::cerr << "rankone: analysis " << a.index << " (" << a.kind << "): " << a.error_message << "\n";
    }
    return report.any_error() ? kExitAnalysis : 0;
}
