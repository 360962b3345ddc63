#include "rankone/odometers.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include <boost/multiprecision/miller_rabin.hpp>

#include "rankone/error.hpp"

namespace rankone {

CyclicSystem::CyclicSystem(std::uint64_t k) : k_(k) {
    if (k < 2) throw Error(ErrorKind::InvalidModulus, "cyclic system needs k >= 2");
}

std::uint64_t CyclicSystem::step(std::uint64_t x) const {
    if (x >= k_) throw Error(ErrorKind::InvalidModulus, "point outside X_k");
    return x + 1 == k_ ? 0 : x + 1;
}

// ---------------------------------------------------------------------------
// Primes

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (e) {
        if (e & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    return result;
}

constexpr std::uint64_t kTrialDivisionBound = 1'000'000;

}  // namespace

bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (p % q == 0) return p == q;
    }
    std::uint64_t d = p - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These bases are deterministic for all 64-bit inputs.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = pow_mod(a, d, p);
        if (x == 1 || x == p - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, p);
            if (x == p - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> factorize(const BigInt& n) {
    if (n < 1) throw Error(ErrorKind::InvalidSpec, "cannot factor " + n.str());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    BigInt rest = n;
    auto strip = [&](std::uint64_t p) {
        std::uint64_t e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    };
    strip(2);
    for (std::uint64_t d = 3; d <= kTrialDivisionBound && BigInt(d) * d <= rest; d += 2) strip(d);
    if (rest == 1) return out;
    const bool fits = rest <= std::numeric_limits<std::uint64_t>::max();
    if (fits && is_prime(rest.convert_to<std::uint64_t>())) {
        out.emplace_back(rest.convert_to<std::uint64_t>(), 1);
        return out;
    }
    if (!fits && boost::multiprecision::miller_rabin_test(rest, 25)) {
        throw Error(ErrorKind::InvalidSpec, "prime factor " + rest.str() + " exceeds 64 bits");
    }
    throw Error(ErrorKind::InvalidSpec, "cannot factor " + n.str() + ": composite cofactor " + rest.str() +
                                            " has no factor below " + std::to_string(kTrialDivisionBound));
}

// ---------------------------------------------------------------------------
// Supernatural

Supernatural& Supernatural::set(std::uint64_t p, PrimeExponent e) {
    if (!is_prime(p)) throw Error(ErrorKind::InvalidSpec, std::to_string(p) + " is not prime");
    if (!e.infinite && e.value == 0) {
        exponents_.erase(p);
    } else {
        exponents_[p] = e;
    }
    return *this;
}

Supernatural& Supernatural::mark_truncated(std::size_t depth) {
    truncated_depth_ = depth;
    return *this;
}

bool Supernatural::divides(const BigInt& k) const {
    if (k < 1) return false;
    for (const auto& [p, e] : factorize(k)) {
        auto it = exponents_.find(p);
        if (it == exponents_.end()) return false;
        if (!it->second.infinite && it->second.value < e) return false;
    }
    return true;
}

std::vector<BigInt> Supernatural::prime_power_ladder(const BigInt& bound) const {
    std::vector<BigInt> out;
    for (const auto& [p, e] : exponents_) {
        BigInt power = p;
        for (std::uint64_t i = 1; power <= bound && (e.infinite || i <= e.value); ++i) {
            out.push_back(power);
            power *= p;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string Supernatural::to_string() const {
    if (exponents_.empty()) return "1";
    std::string s;
    for (const auto& [p, e] : exponents_) {
        if (!s.empty()) s += ",";
        s += std::to_string(p) + "^" + (e.infinite ? std::string("inf") : std::to_string(e.value));
    }
    return s;
}

Supernatural Supernatural::parse(const std::string& text) {
    Supernatural out;
    std::string cleaned;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) cleaned += c;
    }
    if (cleaned.empty() || cleaned == "1") return out;
    std::stringstream ss(cleaned);
    std::string token;
    while (std::getline(ss, token, ',')) {
        auto caret = token.find('^');
        std::string base = token.substr(0, caret);
        std::string exponent = caret == std::string::npos ? "1" : token.substr(caret + 1);
        std::uint64_t p = to_u64(parse_bigint(base), "prime");
        if (out.exponents_.count(p)) {
            throw Error(ErrorKind::ConfigInvalid, "prime " + base + " repeated in '" + text + "'");
        }
        if (exponent == "inf") {
            out.set(p, PrimeExponent::unbounded());
        } else {
            auto e = to_u64(parse_bigint(exponent), "exponent");
            if (e == 0) throw Error(ErrorKind::ConfigInvalid, "zero exponent in '" + text + "'");
            out.set(p, PrimeExponent::finite(e));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// OdometerSpec

struct OdometerSpec::Impl {
    Kind kind = Kind::Explicit;
    std::vector<BigInt> moduli;
    BigInt first;
    std::vector<BigInt> multipliers;
    std::string name;
    std::function<BigInt(std::size_t)> rule;
    std::optional<DivergenceMap> divergence;
    std::optional<bool> summable;

    BigInt raw(std::size_t n) const {
        switch (kind) {
            case Kind::Explicit:
                if (n >= moduli.size()) {
                    throw Error(ErrorKind::StageOutOfRange, "odometer has only " +
                                                                std::to_string(moduli.size()) + " terms");
                }
                return moduli[n];
            case Kind::Periodic: {
                BigInt k = first;
                for (std::size_t i = 0; i < n; ++i) k *= multipliers[i % multipliers.size()];
                return k;
            }
            case Kind::Formula:
                return rule(n);
        }
        return 0;
    }
};

OdometerSpec OdometerSpec::explicit_list(std::vector<BigInt> moduli) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Explicit;
    impl->moduli = std::move(moduli);
    impl->summable = true;  // finitely many terms
    OdometerSpec o;
    o.impl_ = impl;
    for (std::size_t n = 0; n < impl->moduli.size(); ++n) o.modulus(n);
    return o;
}

OdometerSpec OdometerSpec::periodic(BigInt first, std::vector<BigInt> multipliers) {
    if (first < 2) throw Error(ErrorKind::InvalidSpec, "k_0 must be >= 2");
    if (multipliers.empty()) throw Error(ErrorKind::InvalidSpec, "periodic odometer needs multipliers");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Periodic;
    impl->first = std::move(first);
    impl->multipliers = std::move(multipliers);
    DivergenceMap divergence;
    bool grows = false;
    for (const auto& m : impl->multipliers) {
        if (m < 1) throw Error(ErrorKind::InvalidSpec, "multipliers must be >= 1");
        if (m > 1) grows = true;
        for (const auto& [p, e] : factorize(m)) divergence[p] = true;
    }
    for (const auto& [p, e] : factorize(impl->first)) divergence.emplace(p, false);
    impl->divergence = std::move(divergence);
    impl->summable = grows;  // geometric growth iff some multiplier exceeds 1
    OdometerSpec o;
    o.impl_ = impl;
    return o;
}

OdometerSpec OdometerSpec::formula(std::string name, std::function<BigInt(std::size_t)> rule,
                                   std::optional<DivergenceMap> divergence,
                                   std::optional<bool> reciprocal_sum_converges) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Formula;
    impl->name = std::move(name);
    impl->rule = std::move(rule);
    if (divergence) {
        for (const auto& [p, diverges] : *divergence) {
            if (!is_prime(p)) throw Error(ErrorKind::InvalidSpec, std::to_string(p) + " is not prime");
        }
    }
    impl->divergence = std::move(divergence);
    impl->summable = reciprocal_sum_converges;
    OdometerSpec o;
    o.impl_ = impl;
    return o;
}

BigInt OdometerSpec::modulus(std::size_t n) const {
    BigInt k = impl_->raw(n);
    if (k < 2) throw Error(ErrorKind::InvalidSpec, "k_" + std::to_string(n) + " = " + k.str() + " < 2");
    if (n > 0) {
        BigInt prev = impl_->raw(n - 1);
        if (k % prev != 0) {
            throw Error(ErrorKind::InvalidSpec, "k_" + std::to_string(n - 1) + " = " + prev.str() +
                                                    " does not divide k_" + std::to_string(n) + " = " + k.str());
        }
    }
    return k;
}

std::optional<std::size_t> OdometerSpec::length() const {
    if (impl_->kind == Kind::Explicit) return impl_->moduli.size();
    return std::nullopt;
}

const std::optional<OdometerSpec::DivergenceMap>& OdometerSpec::divergence() const { return impl_->divergence; }

std::optional<bool> OdometerSpec::reciprocal_sum_converges() const { return impl_->summable; }

OdometerSpec::Kind OdometerSpec::kind() const { return impl_->kind; }

const std::vector<BigInt>& OdometerSpec::explicit_moduli() const { return impl_->moduli; }
const BigInt& OdometerSpec::periodic_first() const { return impl_->first; }
const std::vector<BigInt>& OdometerSpec::periodic_multipliers() const { return impl_->multipliers; }

std::string OdometerSpec::describe() const {
    switch (impl_->kind) {
        case Kind::Explicit: {
            std::string s = "explicit(";
            for (std::size_t i = 0; i < impl_->moduli.size(); ++i) s += (i ? "," : "") + impl_->moduli[i].str();
            return s + ")";
        }
        case Kind::Periodic: {
            std::string s = "periodic(k0=" + impl_->first.str() + ";x";
            for (std::size_t i = 0; i < impl_->multipliers.size(); ++i) {
                s += (i ? "," : "") + impl_->multipliers[i].str();
            }
            return s + ")";
        }
        case Kind::Formula:
            return impl_->name;
    }
    return {};
}

// ---------------------------------------------------------------------------

Supernatural supernatural_of(const OdometerSpec& odometer, std::size_t probe_depth) {
    if (probe_depth == 0) throw Error(ErrorKind::InvalidSpec, "probe depth must be >= 1");
    Supernatural out;
    switch (odometer.kind()) {
        case OdometerSpec::Kind::Explicit: {
            const std::size_t depth = std::min(probe_depth, *odometer.length());
            if (depth == 0) throw Error(ErrorKind::InvalidSpec, "empty odometer sequence");
            for (std::size_t n = 0; n < depth; ++n) odometer.modulus(n);
            for (const auto& [p, e] : factorize(odometer.modulus(depth - 1))) out.set(p, PrimeExponent::finite(e));
            out.mark_truncated(depth);
            return out;
        }
        case OdometerSpec::Kind::Periodic: {
            for (std::size_t n = 0; n < probe_depth; ++n) odometer.modulus(n);
            const auto first = factorize(odometer.periodic_first());
            for (const auto& [p, diverges] : *odometer.divergence()) {
                if (diverges) {
                    out.set(p, PrimeExponent::unbounded());
                } else {
                    auto it = std::find_if(first.begin(), first.end(), [p = p](const auto& f) { return f.first == p; });
                    out.set(p, PrimeExponent::finite(it->second));
                }
            }
            return out;
        }
        case OdometerSpec::Kind::Formula: {
            const auto& divergence = odometer.divergence();
            if (!divergence) {
                throw Error(ErrorKind::UndeclaredDivergence,
                            odometer.describe() + " carries no per-prime divergence annotations");
            }
            std::map<std::uint64_t, std::uint64_t> last, previous;
            for (std::size_t n = 0; n < probe_depth; ++n) {
                BigInt rest = odometer.modulus(n);
                previous = last;
                last.clear();
                for (const auto& [p, diverges] : *divergence) {
                    std::uint64_t e = 0;
                    while (rest % p == 0) {
                        rest /= p;
                        ++e;
                    }
                    last[p] = e;
                }
                if (rest != 1) {
                    throw Error(ErrorKind::UndeclaredDivergence,
                                "k_" + std::to_string(n) + " has prime factors outside the declared support (cofactor " +
                                    rest.str() + ")");
                }
            }
            for (const auto& [p, diverges] : *divergence) {
                if (diverges) {
                    out.set(p, PrimeExponent::unbounded());
                    continue;
                }
                if (probe_depth >= 2 && previous[p] != last[p]) {
                    throw Error(ErrorKind::UndeclaredDivergence,
                                "exponent of " + std::to_string(p) + " declared finite but still changing at probe depth");
                }
                out.set(p, PrimeExponent::finite(last[p]));
            }
            return out;
        }
    }
    return out;
}

bool odometers_isomorphic(const Supernatural& a, const Supernatural& b) {
    if (a.truncated() || b.truncated()) {
        throw Error(ErrorKind::TruncatedComparison, "cannot compare truncated supernatural numbers (" +
                                                        a.to_string() + " vs " + b.to_string() + ")");
    }
    return a.exponents() == b.exponents();
}

// ---------------------------------------------------------------------------
// Truncated points

void check_point(const OdometerSpec& odometer, const TruncatedPoint& p) {
    BigInt prev_modulus;
    for (std::size_t n = 0; n < p.coords.size(); ++n) {
        BigInt k = odometer.modulus(n);
        const auto& a = p.coords[n];
        if (a < 0 || a >= k) {
            throw Error(ErrorKind::IncoherentPoint,
                        "alpha_" + std::to_string(n) + " = " + a.str() + " outside [0, " + k.str() + ")");
        }
        // Adjacent coherence implies coherence for all m <= n along a divisibility chain.
        if (n > 0 && a % prev_modulus != p.coords[n - 1]) {
            throw Error(ErrorKind::IncoherentPoint,
                        "[alpha_" + std::to_string(n) + "]_k" + std::to_string(n - 1) + " != alpha_" + std::to_string(n - 1));
        }
        prev_modulus = k;
    }
}

TruncatedPoint odometer_step(const OdometerSpec& odometer, const TruncatedPoint& p) {
    check_point(odometer, p);
    TruncatedPoint out;
    out.coords.reserve(p.coords.size());
    for (std::size_t n = 0; n < p.coords.size(); ++n) {
        BigInt next = p.coords[n] + 1;
        if (next == odometer.modulus(n)) next = 0;
        out.coords.push_back(next);
    }
    return out;
}

BigInt canonical_projection(const OdometerSpec& odometer, const TruncatedPoint& p, const BigInt& k) {
    check_point(odometer, p);
    if (k < 2) throw Error(ErrorKind::InvalidModulus, "projection modulus must be >= 2");
    for (std::size_t n = 0; n < p.coords.size(); ++n) {
        if (odometer.modulus(n) % k == 0) return p.coords[n] % k;
    }
    throw Error(ErrorKind::ModulusNotInK,
                k.str() + " divides none of the first " + std::to_string(p.coords.size()) + " moduli");
}

}  // namespace rankone
