#pragma once

// Exact integer and rational arithmetic shared by every module.

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rankone {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Tower stage index (n in h_n, B_n, ...).
using Stage = std::size_t;

/// Default cap on explicitly materialized sets and words.
inline constexpr std::uint64_t kDefaultSizeLimit = 1'000'000;

/// Largest modulus for which a dense residue histogram is allocated.
inline constexpr std::uint64_t kDenseModulusLimit = std::uint64_t{1} << 20;

/// Always "p/q", including q == 1, so machine formats have one shape.
std::string to_fraction_string(const Rational& q);

/// Accepts "p/q", "p" and surrounding whitespace. Throws Error(ConfigInvalid).
Rational parse_rational(std::string_view text);

BigInt parse_bigint(std::string_view text);

std::string to_string(const BigInt& v);

/// Lossy; for human-facing summaries only.
double approximate(const Rational& q);

/// Throws Error(SizeLimitExceeded) naming `what` when v does not fit.
std::uint64_t to_u64(const BigInt& v, std::string_view what);

BigInt pow_big(const BigInt& base, unsigned exponent);

/// Nonnegative representative of v mod k, k > 0.
BigInt mod_floor(const BigInt& v, const BigInt& k);

std::uint64_t mod_u64(const BigInt& v, std::uint64_t k);

}  // namespace rankone
