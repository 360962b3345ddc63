#pragma once

// Symbolic rank-one words v_n over {0, 1}.

#include <cstdint>
#include <string>
#include <vector>

#include "rankone/core.hpp"

namespace rankone {

struct RankOneWord {
    Stage stage = 0;
    std::string symbols;  // ASCII '0' / '1', starts with '0'
};

/// v_0 = "0", v_{n+1} = v_n 1^{s_{n,1}} v_n 1^{s_{n,2}} ... v_n 1^{s_{n,r_n}}.
RankOneWord generate_word(const RankOneSpec& spec, Stage n,
                          std::uint64_t length_limit = kDefaultSizeLimit);

/// Start positions of the canonical v_m blocks of v_n, read off the
/// concatenation that builds v_n (never by substring search: v_m may also
/// occur non-canonically).
std::vector<std::uint64_t> canonical_occurrences(const RankOneSpec& spec, Stage m, Stage n,
                                                 std::uint64_t length_limit = kDefaultSizeLimit);

}  // namespace rankone
