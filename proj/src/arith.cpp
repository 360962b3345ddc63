#include "rankone/arith.hpp"

#include <cctype>
#include <limits>

#include "rankone/error.hpp"

namespace rankone {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string to_fraction_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

BigInt parse_bigint(std::string_view text) {
    auto s = trim(text);
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start) throw Error(ErrorKind::ConfigInvalid, "empty integer");
    for (std::size_t i = start; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            throw Error(ErrorKind::ConfigInvalid, "not an integer: '" + std::string(text) + "'");
        }
    }
    return BigInt(std::string(s[0] == '+' ? s.substr(1) : s));
}

Rational parse_rational(std::string_view text) {
    auto s = trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(parse_bigint(s));
    BigInt num = parse_bigint(s.substr(0, slash));
    BigInt den = parse_bigint(s.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::ConfigInvalid, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

std::string to_string(const BigInt& v) { return v.str(); }

double approximate(const Rational& q) { return q.convert_to<double>(); }

std::uint64_t to_u64(const BigInt& v, std::string_view what) {
    if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) {
        throw Error(ErrorKind::SizeLimitExceeded,
                    std::string(what) + " does not fit in 64 bits: " + v.str());
    }
    return v.convert_to<std::uint64_t>();
}

BigInt pow_big(const BigInt& base, unsigned exponent) {
    return boost::multiprecision::pow(base, exponent);
}

BigInt mod_floor(const BigInt& v, const BigInt& k) {
    BigInt r = v % k;
    if (r < 0) r += k;
    return r;
}

std::uint64_t mod_u64(const BigInt& v, std::uint64_t k) {
    return mod_floor(v, BigInt(k)).convert_to<std::uint64_t>();
}

}  // namespace rankone
