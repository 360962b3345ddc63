#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankone/cli.hpp"
#include "rankone/constructions.hpp"
#include "rankone/criteria.hpp"
#include "rankone/error.hpp"
#include "rankone/measure.hpp"
#include "rankone/words.hpp"

namespace py = pybind11;
using namespace rankone;

namespace {

// Python ints and Fractions cross the boundary through decimal strings.
py::int_ to_py(const BigInt& v) {
    return py::reinterpret_steal<py::int_>(PyLong_FromString(v.str().c_str(), nullptr, 10));
}

py::object to_py(const Rational& q) {
    return py::module_::import("fractions").attr("Fraction")(to_py(numerator(q)), to_py(denominator(q)));
}

BigInt to_big(const py::handle& h) { return parse_bigint(py::str(h).cast<std::string>()); }

Rational to_rational(const py::handle& h) {
    if (py::isinstance<py::str>(h)) return parse_rational(h.cast<std::string>());
    if (py::isinstance<py::float_>(h)) throw Error(ErrorKind::ConfigInvalid, "floats are not exact; pass a Fraction or \"p/q\"");
    if (py::hasattr(h, "denominator")) return Rational(to_big(h.attr("numerator")), to_big(h.attr("denominator")));
    return Rational(to_big(h));
}

py::list to_py(const std::vector<BigInt>& xs) {
    py::list out;
    for (const auto& x : xs) out.append(to_py(x));
    return out;
}

StageParams stage_from(const py::handle& h) {
    if (py::isinstance<py::dict>(h)) {
        auto d = h.cast<py::dict>();
        std::vector<std::pair<BigInt, BigInt>> spacers;
        if (d.contains("spacers")) {
            for (auto pair : d["spacers"]) {
                auto t = pair.cast<py::sequence>();
                spacers.emplace_back(to_big(t[0]), to_big(t[1]));
            }
        }
        return StageParams::sparse(to_big(d["cuts"]), std::move(spacers));
    }
    std::vector<BigInt> counts;
    for (auto c : h.cast<py::sequence>()) counts.push_back(to_big(c));
    return StageParams::dense(counts);
}

std::vector<StageParams> stages_from(const py::sequence& seq) {
    std::vector<StageParams> stages;
    for (auto s : seq) stages.push_back(stage_from(s));
    return stages;
}

py::dict to_py(const CyclicDiscrepancy& d) {
    py::dict out;
    out["m"] = d.m;
    out["n"] = d.n;
    out["k"] = to_py(d.k);
    out["best_j"] = to_py(d.best_j);
    out["delta"] = to_py(d.delta);
    out["method"] = d.method;
    return out;
}

py::dict to_py(const SymmetricDifferenceFit& f) {
    py::dict out;
    out["l"] = f.l;
    out["m"] = f.m;
    out["k"] = to_py(f.k);
    out["best_d"] = f.best_d ? py::object(to_py(*f.best_d)) : py::none();
    out["d_size"] = to_py(f.d_size);
    out["eps_star"] = to_py(f.eps_star);
    out["method"] = f.method;
    return out;
}

py::dict to_py(const CriterionVerdict& v) {
    py::dict out;
    out["status"] = to_string(v.status);
    out["criterion"] = v.criterion;
    out["depth"] = v.depth;
    out["zero_evidence"] = v.zero_evidence;
    py::list windows, fits, parts;
    for (const auto& w : v.windows) windows.append(to_py(w));
    for (const auto& f : v.fits) fits.append(to_py(f));
    for (const auto& p : v.parts) parts.append(to_py(p));
    py::dict profile;
    for (const auto& [start, delta] : v.profile) profile[py::int_(start)] = to_py(delta);
    out["windows"] = windows;
    out["fits"] = fits;
    out["parts"] = parts;
    out["profile"] = profile;
    out["notes"] = v.notes;
    return out;
}

std::vector<BigInt> bigs_from(const py::sequence& seq) {
    std::vector<BigInt> out;
    for (auto x : seq) out.push_back(to_big(x));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact finite-depth analysis of rank-one constructions";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&] { return py::exception<Error>(m, "RankOneError"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::object& type = error_type.get_stored();
            py::object exc = type(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(type.ptr(), exc.ptr());
        }
    });

    py::class_<RankOneSpec>(m, "Spec")
        .def_static("table", [](const py::sequence& s) { return RankOneSpec::table(stages_from(s)); },
                    py::arg("stages"), "Finite table of stages; a stage is a list of spacer counts or {cuts, spacers}.")
        .def_static("periodic", [](const py::sequence& s) { return RankOneSpec::periodic(stages_from(s)); },
                    py::arg("cycle"))
        .def_static(
            "preset",
            [](const std::string& name, const py::kwargs& kw) {
                std::map<std::string, std::string> params;
                for (auto [k, v] : kw) {
                    params[k.cast<std::string>()] =
                        py::isinstance<py::bool_>(v) ? (v.cast<bool>() ? "true" : "false") : py::str(v).cast<std::string>();
                }
                return preset_by_name(name, params).spec;
            },
            py::arg("name"))
        .def("describe", &RankOneSpec::describe)
        .def("__repr__", [](const RankOneSpec& s) { return "Spec(" + s.describe() + ")"; });

    m.def("preset_names", &preset_names);
    m.def("preset_target", [](const std::string& name, const py::kwargs& kw) -> py::object {
        std::map<std::string, std::string> params;
        for (auto [k, v] : kw) params[k.cast<std::string>()] = py::str(v).cast<std::string>();
        const auto p = preset_by_name(name, params);
        return p.target ? py::object(py::str(p.target->to_string())) : py::none();
    }, py::arg("name"));

    m.def("height", [](const RankOneSpec& s, Stage n) { return to_py(height(s, n)); }, py::arg("spec"), py::arg("n"));
    m.def("word", [](const RankOneSpec& s, Stage n, std::uint64_t limit) { return generate_word(s, n, limit).symbols; },
          py::arg("spec"), py::arg("n"), py::arg("length_limit") = kDefaultSizeLimit);
    m.def("index_set",
          [](const RankOneSpec& s, Stage a, Stage b, std::uint64_t limit) { return to_py(index_set(s, a, b, limit).indices); },
          py::arg("spec"), py::arg("m"), py::arg("n"), py::arg("size_limit") = kDefaultSizeLimit);
    m.def("canonical_occurrences", &canonical_occurrences, py::arg("spec"), py::arg("m"), py::arg("n"),
          py::arg("length_limit") = kDefaultSizeLimit);
    m.def("residue_histogram",
          [](const RankOneSpec& s, Stage a, Stage b, std::uint64_t k) { return to_py(residue_histogram(s, a, b, k).counts); },
          py::arg("spec"), py::arg("m"), py::arg("n"), py::arg("k"));
    m.def("mass_check", [](const RankOneSpec& s, Stage depth) {
        py::list out;
        for (const auto& t : mass_check(s, depth).partial_sums) out.append(to_py(t));
        return out;
    }, py::arg("spec"), py::arg("depth"), "Partial sums of the spacer mass terms.");

    m.def("cyclic_discrepancy",
          [](const RankOneSpec& s, Stage a, Stage b, const py::handle& k, std::uint64_t limit) {
              return to_py(cyclic_discrepancy(s, a, b, to_big(k), limit));
          },
          py::arg("spec"), py::arg("m"), py::arg("n"), py::arg("k"), py::arg("size_limit") = kDefaultSizeLimit);
    m.def("symmetric_difference_fit",
          [](const RankOneSpec& s, Stage l, Stage a, const py::handle& k, std::uint64_t limit) {
              return to_py(symmetric_difference_fit(s, l, a, to_big(k), limit));
          },
          py::arg("spec"), py::arg("l"), py::arg("m"), py::arg("k"), py::arg("size_limit") = kDefaultSizeLimit);
    m.def("check_cyclic_factor",
          [](const RankOneSpec& s, const py::handle& k, const py::handle& eta, Stage start, Stage depth) {
              return to_py(check_cyclic_factor(s, to_big(k), to_rational(eta), start, depth));
          },
          py::arg("spec"), py::arg("k"), py::arg("eta"), py::arg("start"), py::arg("depth"));
    m.def("check_odometer_factor",
          [](const RankOneSpec& s, const std::string& target, const py::sequence& probes, const py::handle& eta,
             Stage start, Stage depth) {
              return to_py(check_odometer_factor(s, Supernatural::parse(target), bigs_from(probes), to_rational(eta),
                                                 start, depth));
          },
          py::arg("spec"), py::arg("target"), py::arg("probes"), py::arg("eta"), py::arg("start"), py::arg("depth"));
    m.def("total_ergodicity_probe",
          [](const RankOneSpec& s, std::uint64_t k_max, const py::handle& eta, Stage start, Stage depth) {
              py::list out;
              for (const auto& row : total_ergodicity_probe(s, k_max, to_rational(eta), start, depth)) {
                  py::dict d;
                  d["k"] = row.k;
                  d["status"] = to_string(row.verdict.status);
                  d["min_window_delta"] = to_py(row.min_window_delta);
                  d["min_window"] = to_py(row.min_window);
                  out.append(d);
              }
              return out;
          },
          py::arg("spec"), py::arg("k_max"), py::arg("eta"), py::arg("start"), py::arg("depth"));

    m.def("supernatural_of",
          [](const py::sequence& moduli, std::size_t probe_depth) {
              return supernatural_of(OdometerSpec::explicit_list(bigs_from(moduli)), probe_depth).to_string();
          },
          py::arg("moduli"), py::arg("probe_depth") = 8, "Divisor closure of an explicit (truncated) modulus list.");
    m.def("supernatural_of_power",
          [](const py::handle& base, std::size_t probe_depth) {
              const BigInt b = to_big(base);
              return supernatural_of(OdometerSpec::periodic(b, {b}), probe_depth).to_string();
          },
          py::arg("base"), py::arg("probe_depth") = 8, "Supernatural number of k_n = base^{n+1}.");
    m.def("odometers_isomorphic", [](const std::string& a, const std::string& b) {
        return odometers_isomorphic(Supernatural::parse(a), Supernatural::parse(b));
    }, py::arg("a"), py::arg("b"));

    m.def("run_config",
          [](const std::string& text) {
              const auto report = cli::run(cli::parse_config(cli::parse_json_text(text, "config")));
              return cli::emit_json(report);
          },
          py::arg("config_text"), "Runs a JSON run config and returns the JSON report.");
    m.attr("__version__") = cli::tool_version();
}
