#include "rankone/constructions.hpp"

#include <algorithm>
#include <sstream>

#include "rankone/error.hpp"

namespace rankone {

BigInt Preset::verified_height(Stage n) const {
    BigInt h = height(spec, n);
    if (height_identity) {
        BigInt expected = height_identity(n);
        if (h != expected) {
            throw Error(ErrorKind::IdentityViolation, name + ": h_" + std::to_string(n) + " = " + h.str() +
                                                          " but the closed form gives " + expected.str());
        }
    }
    return h;
}

void Preset::verify(Stage depth) const {
    for (Stage n = 0; n <= depth; ++n) verified_height(n);
}

Preset build_cyclic_embedding(std::uint64_t k, bool with_spacers) {
    if (k < 2) throw Error(ErrorKind::InvalidModulus, "cyclic embedding needs k >= 2");
    std::vector<BigInt> counts(k, BigInt(0));
    if (with_spacers) counts.back() = k;
    Preset p("cyclic_embedding", RankOneSpec::periodic({StageParams::dense(counts)}));
    p.params = {{"k", std::to_string(k)}, {"with_spacers", with_spacers ? "true" : "false"}};
    p.provenance = "r_n = k with a trailing spacer run of k levels";
    Supernatural target;
    for (const auto& [q, e] : factorize(k)) {
        target.set(q, with_spacers ? PrimeExponent::finite(e) : PrimeExponent::unbounded());
    }
    p.target = target;
    if (with_spacers) {
        // h_{n+1} = k h_n + k.
        p.height_identity = [k](Stage n) {
            const BigInt kn = pow_big(k, static_cast<unsigned>(n));
            return BigInt((kn * (2 * k - 1) - k) / (k - 1));
        };
    } else {
        p.height_identity = [k](Stage n) { return pow_big(k, static_cast<unsigned>(n)); };
    }
    return p;
}

Preset build_afp(const OdometerSpec& odometer) {
    const auto summable = odometer.reciprocal_sum_converges();
    if (!summable) {
        throw Error(ErrorKind::SummabilityUndeclared, odometer.describe() + " does not declare sum 1/k_n");
    }
    if (!*summable) throw Error(ErrorKind::NotSummable, odometer.describe() + " has sum 1/k_n = infinity");
    const BigInt k0 = odometer.modulus(0);
    if (k0 < 3) {
        throw Error(ErrorKind::CuttingTooSmall, "k_0 = " + k0.str() + " gives r_0 = k_0 - 1 < 2");
    }

    // h_n = prod_{j<n} k_j.
    const auto product = [odometer](Stage n) {
        BigInt h = 1;
        for (Stage j = 0; j < n; ++j) h *= odometer.modulus(j);
        return h;
    };
    const auto stage = [odometer, product](Stage n) {
        const BigInt r = odometer.modulus(n) - 1;
        return StageParams::sparse(r, {{r, product(n)}});
    };

    Preset p("afp", RankOneSpec::formula("afp " + odometer.describe(), stage));
    p.params = {{"odometer", odometer.describe()}};
    p.provenance = "v_{n+1} = v_n^{k_n - 1} 1^{h_n}";
    p.height_identity = product;
    if (const auto len = odometer.length()) {
        std::vector<StageParams> stages;
        for (Stage n = 0; n < *len; ++n) stages.push_back(stage(n));
        p.spec = RankOneSpec::table(std::move(stages));
        Supernatural target;
        for (const auto& [q, e] : factorize(product(*len))) target.set(q, PrimeExponent::finite(e));
        target.mark_truncated(*len);
        p.target = target;
    } else {
        // Every prime of k_0 divides each later k_n, and every prime of
        // some k_n divides all k_m past it, so the partial products carry
        // each supported prime to infinite exponent.
        try {
            Supernatural of = supernatural_of(odometer, 8);
            Supernatural target;
            for (const auto& [q, e] : of.exponents()) target.set(q, PrimeExponent::unbounded());
            p.target = target;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndeclaredDivergence) throw;
        }
    }
    for (Stage n = 1; n < 4 && (!odometer.length() || n < *odometer.length()); ++n) {
        if (odometer.modulus(n) < 3) throw Error(ErrorKind::CuttingTooSmall, "k_n < 3");
    }
    return p;
}

Preset build_gapped_pairs() {
    Preset p("gapped_pairs", RankOneSpec::formula("gapped_pairs", [](Stage n) {
                 return StageParams::sparse(4, {{2, pow_big(2, static_cast<unsigned>(n + 1))}});
             }));
    p.target = Supernatural().set(2, PrimeExponent::unbounded());
    p.provenance = "v_{n+1} = v_n v_n 1^{2^{n+1}} v_n v_n";
    p.height_identity = [](Stage n) {
        return BigInt(pow_big(2, static_cast<unsigned>(n)) * (pow_big(2, static_cast<unsigned>(n + 1)) - 1));
    };
    return p;
}

Preset build_chacon() {
    Preset p("chacon", RankOneSpec::periodic({StageParams::dense({0, 1, 0})}));
    p.provenance = "Chacon's transformation; negative control, no finite cyclic factor";
    p.height_identity = [](Stage n) { return BigInt((pow_big(3, static_cast<unsigned>(n + 1)) - 1) / 2); };
    return p;
}

Preset build_dyadic() {
    Preset p("dyadic", RankOneSpec::periodic({StageParams::dense({0, 0})}));
    p.target = Supernatural().set(2, PrimeExponent::unbounded());
    p.provenance = "r = 2 without spacers";
    p.height_identity = [](Stage n) { return pow_big(2, static_cast<unsigned>(n)); };
    return p;
}

std::vector<std::string> preset_names() { return {"afp", "chacon", "cyclic_embedding", "dyadic", "gapped_pairs"}; }

namespace {

std::uint64_t param_u64(const std::map<std::string, std::string>& params, const std::string& key,
                        std::uint64_t fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        return to_u64(parse_bigint(it->second), key);
    } catch (const Error&) {
        throw Error(ErrorKind::ConfigInvalid, "preset parameter " + key + " = '" + it->second + "' is not a count");
    }
}

bool param_bool(const std::map<std::string, std::string>& params, const std::string& key, bool fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw Error(ErrorKind::ConfigInvalid, "preset parameter " + key + " = '" + it->second + "' is not a boolean");
}

void reject_unknown(const std::string& name, const std::map<std::string, std::string>& params,
                    const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : params) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorKind::ConfigInvalid, "preset " + name + " has no parameter " + key);
        }
    }
}

}  // namespace

Preset preset_by_name(const std::string& name, const std::map<std::string, std::string>& params) {
    if (name == "chacon" || name == "dyadic" || name == "gapped_pairs") {
        reject_unknown(name, params, {});
        if (name == "chacon") return build_chacon();
        if (name == "dyadic") return build_dyadic();
        return build_gapped_pairs();
    }
    if (name == "cyclic_embedding") {
        reject_unknown(name, params, {"k", "with_spacers"});
        return build_cyclic_embedding(param_u64(params, "k", 6), param_bool(params, "with_spacers", true));
    }
    if (name == "afp") {
        reject_unknown(name, params, {"base", "moduli"});
        if (auto it = params.find("moduli"); it != params.end()) {
            if (params.count("base")) throw Error(ErrorKind::ConfigInvalid, "afp takes base or moduli, not both");
            std::vector<BigInt> moduli;
            std::stringstream in(it->second);
            std::string token;
            while (std::getline(in, token, ',')) {
                try {
                    moduli.push_back(parse_bigint(token));
                } catch (const Error&) {
                    throw Error(ErrorKind::ConfigInvalid, "afp moduli entry '" + token + "' is not an integer");
                }
            }
            if (moduli.empty()) throw Error(ErrorKind::ConfigInvalid, "afp moduli list is empty");
            return build_afp(OdometerSpec::explicit_list(std::move(moduli)));
        }
        const auto b = param_u64(params, "base", 4);
        return build_afp(OdometerSpec::periodic(b, {BigInt(b)}));
    }
    throw Error(ErrorKind::ConfigInvalid, "unknown preset '" + name + "'");
}

}  // namespace rankone
