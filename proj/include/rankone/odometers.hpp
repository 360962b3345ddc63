#pragma once

// Finite cyclic permutations Z/kZ, odometers O_K and their classification
// by supernatural numbers.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rankone/arith.hpp"

namespace rankone {

/// (X_k, mu_k, f_k) with f_k(i) = [i+1]_k.
class CyclicSystem {
public:
    explicit CyclicSystem(std::uint64_t k);

    std::uint64_t modulus() const { return k_; }
    std::uint64_t step(std::uint64_t x) const;
    Rational atom_measure() const { return Rational(1, k_); }

private:
    std::uint64_t k_;
};

/// Per-prime exponent of a supernatural number: a natural number or infinity.
struct PrimeExponent {
    std::uint64_t value = 0;
    bool infinite = false;

    static PrimeExponent finite(std::uint64_t v) { return {v, false}; }
    static PrimeExponent unbounded() { return {0, true}; }

    friend bool operator==(const PrimeExponent&, const PrimeExponent&) = default;
};

/// prod p^{e_p}, e_p in N u {inf}, over a finite prime support. Encodes the
/// divisor-closed set K = { m : m | k_n for some n } of an odometer.
class Supernatural {
public:
    Supernatural() = default;

    /// e == 0 removes p. Throws InvalidSpec when p is not prime.
    Supernatural& set(std::uint64_t p, PrimeExponent e);

    const std::map<std::uint64_t, PrimeExponent>& exponents() const { return exponents_; }

    /// Set when only a finite prefix of (k_n) was seen; the exponents are
    /// then those of the last probed term and say nothing about the limit.
    bool truncated() const { return truncated_depth_.has_value(); }
    std::optional<std::size_t> truncated_depth() const { return truncated_depth_; }
    Supernatural& mark_truncated(std::size_t depth);

    /// k in K: every prime power of k is dominated.
    bool divides(const BigInt& k) const;

    /// All p^e in K with 1 <= e and p^e <= bound, sorted ascending.
    std::vector<BigInt> prime_power_ladder(const BigInt& bound) const;

    /// "2^inf,3^2" (sorted by prime); "1" for the empty product. Truncation
    /// is not part of the token list.
    std::string to_string() const;
    static Supernatural parse(const std::string& text);

    friend bool operator==(const Supernatural&, const Supernatural&) = default;

private:
    std::map<std::uint64_t, PrimeExponent> exponents_;
    std::optional<std::size_t> truncated_depth_;
};

/// Prime factorization as (prime, exponent), ascending. Trial division
/// with a probabilistic primality test on the cofactor; throws InvalidSpec
/// when a composite cofactor without small factors remains.
std::vector<std::pair<std::uint64_t, std::uint64_t>> factorize(const BigInt& n);

bool is_prime(std::uint64_t p);

/// A divisibility chain k_0 | k_1 | ..., each k_n >= 2.
class OdometerSpec {
public:
    /// Exponent behaviour per prime, declared for formula rules.
    using DivergenceMap = std::map<std::uint64_t, bool>;

    static OdometerSpec explicit_list(std::vector<BigInt> moduli);
    /// k_0 = first, k_{n+1} = k_n * multipliers[n mod len]. Divergence and
    /// summability of sum 1/k_n follow exactly from the multipliers.
    static OdometerSpec periodic(BigInt first, std::vector<BigInt> multipliers);
    /// `divergence` lists every prime that can divide some k_n and whether
    /// its exponent is unbounded. `reciprocal_sum_converges` declares
    /// whether sum 1/k_n < inf; left empty it is undeclared.
    static OdometerSpec formula(std::string name, std::function<BigInt(std::size_t)> rule,
                                std::optional<DivergenceMap> divergence = std::nullopt,
                                std::optional<bool> reciprocal_sum_converges = std::nullopt);

    /// k_n, validated (k_n >= 2 and k_{n-1} | k_n).
    BigInt modulus(std::size_t n) const;

    std::optional<std::size_t> length() const;
    const std::optional<DivergenceMap>& divergence() const;
    std::optional<bool> reciprocal_sum_converges() const;
    std::string describe() const;

    enum class Kind { Explicit, Periodic, Formula };
    Kind kind() const;

    /// Raw data for serialization; empty for formula rules.
    const std::vector<BigInt>& explicit_moduli() const;
    const BigInt& periodic_first() const;
    const std::vector<BigInt>& periodic_multipliers() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Reads the divisor closure of (k_n). Explicit lists give a truncated
/// value; periodic and annotated formula rules give exact exponents.
/// Throws UndeclaredDivergence for formula rules without annotations or
/// when a probed k_n has a prime outside the declared support.
Supernatural supernatural_of(const OdometerSpec& odometer, std::size_t probe_depth);

/// Odometers are isomorphic iff their supernatural numbers agree. Throws
/// TruncatedComparison when either side is truncated.
bool odometers_isomorphic(const Supernatural& a, const Supernatural& b);

/// (alpha_0, ..., alpha_{d-1}) with alpha_n in [0, k_n), [alpha_n]_{k_m} = alpha_m.
struct TruncatedPoint {
    std::vector<BigInt> coords;

    friend bool operator==(const TruncatedPoint&, const TruncatedPoint&) = default;
};

/// Throws IncoherentPoint when p is not a valid truncated point of `odometer`.
void check_point(const OdometerSpec& odometer, const TruncatedPoint& p);

/// Coordinatewise +1 mod k_n.
TruncatedPoint odometer_step(const OdometerSpec& odometer, const TruncatedPoint& p);

/// pi_k(p) = [alpha_n]_k for the least n < depth(p) with k | k_n. Throws
/// ModulusNotInK when no probed k_n is a multiple of k.
BigInt canonical_projection(const OdometerSpec& odometer, const TruncatedPoint& p, const BigInt& k);

}  // namespace rankone
