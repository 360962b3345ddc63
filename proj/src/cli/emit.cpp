#include <fstream>
#include <iomanip>
#include <sstream>

#include "rankone/cli.hpp"
#include "rankone/error.hpp"

namespace rankone::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace

std::string emit_json(const Report& report) {
    Json analyses = Json::array();
    for (const auto& a : report.analyses) {
        Json rec = {{"index", a.index}, {"kind", a.kind}, {"params", a.params}, {"result", a.result}};
        rec["error"] = a.error_kind ? Json{{"kind", *a.error_kind}, {"message", a.error_message}} : Json(nullptr);
        analyses.push_back(rec);
    }
    const Json doc = {{"tool_version", report.tool_version}, {"config", report.config}, {"analyses", analyses}};
    return doc.dump(2) + "\n";
}

std::string emit_csv(const AnalysisRecord& record) {
    std::string out = "k,m,n,best_j,delta_num,delta_den\n";
    for (const auto& w : record.grid) {
        out += to_string(w.k) + "," + std::to_string(w.m) + "," + std::to_string(w.n) + "," + to_string(w.best_j) + "," +
               to_string(numerator(w.delta)) + "," + to_string(denominator(w.delta)) + "\n";
    }
    return out;
}

std::string emit_csv(const Report& report) {
    std::string out;
    for (const auto& a : report.analyses) {
        if (a.grid.empty()) continue;
        out += "# analysis " + std::to_string(a.index) + " " + a.kind + "\n" + emit_csv(a);
    }
    return out;
}

std::string emit_text(const Report& report) {
    std::ostringstream s;
    s << "rankone " << report.tool_version << "\n";
    s << "spec " << report.config.at("spec").dump() << "\n";
    for (const auto& a : report.analyses) {
        s << "[" << a.index << "] " << a.kind;
        if (a.error_kind) {
            s << ": error " << a.error_message << "\n";
            continue;
        }
        s << "\n";
        for (const auto& line : a.summary) s << "    " << line << "\n";
    }
    s << std::fixed << std::setprecision(3) << "wall time ~" << report.wall_seconds << " s\n";
    return s.str();
}

void write_outputs(const Report& report, const std::filesystem::path& dir, const std::vector<std::string>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& f : formats) {
        if (f == "json") {
            write_file(dir / "report.json", emit_json(report));
        } else if (f == "csv") {
            for (const auto& a : report.analyses) {
                if (!a.grid.empty()) write_file(dir / ("grid_" + std::to_string(a.index) + ".csv"), emit_csv(a));
            }
        } else if (f == "text") {
            write_file(dir / "report.txt", emit_text(report));
        } else {
            throw Error(ErrorKind::ConfigInvalid, "unknown format '" + f + "'");
        }
    }
}

}  // namespace rankone::cli
