#pragma once

// Named rank-one constructions, each with the closed forms it promises.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankone/core.hpp"
#include "rankone/odometers.hpp"

namespace rankone {

struct Preset {
    Preset(std::string name, RankOneSpec spec) : name(std::move(name)), spec(std::move(spec)) {}

    std::string name;
    std::map<std::string, std::string> params;
    RankOneSpec spec;
    /// Odometer the construction is meant to factor onto or be isomorphic to.
    std::optional<Supernatural> target;
    std::string provenance;
    /// Closed form for h_n, when one is declared.
    std::function<BigInt(Stage)> height_identity;

    /// h_n, checked against the declared closed form. Throws IdentityViolation.
    BigInt verified_height(Stage n) const;

    /// Re-checks every declared identity for stages 0..depth.
    void verify(Stage depth) const;
};

/// r_n = k; with spacers s_{n,k} = k and zero elsewhere, so h_n is a
/// multiple of k from stage 1 on. Without spacers it is the k-adic odometer.
Preset build_cyclic_embedding(std::uint64_t k, bool with_spacers = true);

/// v_{n+1} = v_n^{k_n - 1} 1^{h_n}: r_n = k_n - 1 and one trailing spacer
/// run of length h_n, so h_{n+1} = k_n h_n. Throws CuttingTooSmall when
/// k_0 < 3, SummabilityUndeclared or NotSummable when sum 1/k_n is not
/// declared finite.
Preset build_afp(const OdometerSpec& odometer);

/// v_{n+1} = v_n v_n 1^{2^{n+1}} v_n v_n; h_n = 2^n (2^{n+1} - 1).
Preset build_gapped_pairs();

/// Chacon's transformation, r = 3, s = (0, 1, 0). Totally ergodic control.
Preset build_chacon();

/// r = 2, no spacers: the dyadic odometer.
Preset build_dyadic();

/// Names accepted by preset_by_name.
std::vector<std::string> preset_names();

/// Preset by name with string parameters:
///   cyclic_embedding: k (default 6), with_spacers (default true)
///   afp: base b for k_n = b^{n+1} (default 4), or moduli "k0,k1,..."
/// Throws ConfigInvalid for unknown names or parameters.
Preset preset_by_name(const std::string& name, const std::map<std::string, std::string>& params = {});

}  // namespace rankone
