#include <doctest.h>

#include "rankone/constructions.hpp"
#include "rankone/criteria.hpp"
#include "rankone/error.hpp"
#include "rankone/measure.hpp"
#include "rankone/words.hpp"

using namespace rankone;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("gapped pairs") {
    const auto p = build_gapped_pairs();
    CHECK(p.verified_height(3) == 120);
    CHECK(generate_word(p.spec, 1).symbols == "001100");
    CHECK(index_set(p.spec, 1, 2).indices == std::vector<BigInt>{0, 6, 16, 22});
    p.verify(30);
    CHECK(p.target->to_string() == "2^inf");
}

TEST_CASE("chacon") {
    const auto p = build_chacon();
    CHECK(p.verified_height(2) == 13);
    CHECK(generate_word(p.spec, 2).symbols == "0010001010010");
    p.verify(25);
    CHECK_FALSE(p.target);
}

TEST_CASE("cyclic embedding") {
    const auto p = build_cyclic_embedding(6);
    CHECK(p.spec.stage(0).cuts == 6);
    CHECK(p.verified_height(1) == 12);
    p.verify(20);
    for (Stage n = 1; n <= 20; ++n) CHECK(height(p.spec, n) % 6 == 0);
    for (Stage m = 1; m <= 4; ++m) {
        for (Stage n = m; n <= m + 8; ++n) CHECK(cyclic_discrepancy(p.spec, m, n, 6).delta == 0);
    }
    const auto plain = build_cyclic_embedding(2, false);
    for (Stage n = 0; n <= 10; ++n) CHECK(plain.verified_height(n) == pow_big(2, static_cast<unsigned>(n)));
    CHECK(plain.target->to_string() == "2^inf");
    CHECK(p.target->to_string() == "2^1,3^1");
    CHECK(kind_of([] { build_cyclic_embedding(1); }) == ErrorKind::InvalidModulus);
}

TEST_CASE("afp from an odometer") {
    const auto p = build_afp(OdometerSpec::periodic(4, {4}));
    CHECK(generate_word(p.spec, 1).symbols == "0001");
    for (Stage n = 0; n < 6; ++n) {
        CHECK(height(p.spec, n + 1) == pow_big(4, static_cast<unsigned>(n + 1)) * height(p.spec, n));
    }
    p.verify(10);
    CHECK(p.target->to_string() == "2^inf");

    // 12 * 2^n: the partial products carry 3 to infinite exponent.
    const auto mixed = build_afp(OdometerSpec::periodic(12, {2}));
    CHECK(mixed.target->to_string() == "2^inf,3^inf");

    const auto finite = build_afp(OdometerSpec::explicit_list({3, 6, 12}));
    CHECK(finite.verified_height(3) == 216);
    CHECK(finite.target->truncated());
    CHECK(kind_of([&] { height(finite.spec, 4); }) == ErrorKind::StageOutOfRange);
}

TEST_CASE("afp error paths") {
    CHECK(kind_of([] { build_afp(OdometerSpec::periodic(2, {2})); }) == ErrorKind::CuttingTooSmall);
    const auto harmonic = OdometerSpec::formula("(n+3)!/2", [](std::size_t n) {
        BigInt f = 1;
        for (std::size_t i = 3; i <= n + 3; ++i) f *= i;
        return f;
    });
    CHECK(kind_of([&] { build_afp(harmonic); }) == ErrorKind::SummabilityUndeclared);
    const auto divergent = OdometerSpec::formula("k", [](std::size_t) { return BigInt(6); }, std::nullopt, false);
    CHECK(kind_of([&] { build_afp(divergent); }) == ErrorKind::NotSummable);
    CHECK(kind_of([] { build_afp(OdometerSpec::periodic(3, {1})); }) == ErrorKind::NotSummable);
}

TEST_CASE("declared identities are enforced") {
    auto p = build_chacon();
    p.height_identity = [](Stage n) { return BigInt(n + 1); };
    CHECK(p.verified_height(0) == 1);
    CHECK(kind_of([&] { p.verify(3); }) == ErrorKind::IdentityViolation);
}

TEST_CASE("presets by name") {
    for (const auto& name : preset_names()) CHECK(preset_by_name(name).name == name);
    CHECK(preset_by_name("cyclic_embedding", {{"k", "4"}}).verified_height(1) == 8);
    CHECK(preset_by_name("afp", {{"base", "3"}}).verified_height(2) == 27);
    CHECK(preset_by_name("afp", {{"moduli", "4,8"}}).verified_height(2) == 32);
    CHECK(kind_of([] { preset_by_name("nope"); }) == ErrorKind::ConfigInvalid);
    CHECK(kind_of([] { preset_by_name("chacon", {{"k", "2"}}); }) == ErrorKind::ConfigInvalid);
    CHECK(kind_of([] { preset_by_name("cyclic_embedding", {{"k", "x"}}); }) == ErrorKind::ConfigInvalid);
    CHECK(kind_of([] { preset_by_name("afp", {{"moduli", "4,x"}}); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("afp passes its own isomorphism check") {
    const auto p = build_afp(OdometerSpec::periodic(4, {4}));
    const BigInt k = height(p.spec, 3);
    std::vector<IsoScheduleRow> rows;
    for (Stage l = 0; l <= 2; ++l) rows.push_back({l, Rational(1, 10), {k}, 3, 8});
    CHECK(check_isomorphic_to_odometer(p.spec, *p.target, rows, {{4, 16}, Rational(1, 100), 3, 8}).passed());
}
