#include "rankone/words.hpp"

#include "rankone/error.hpp"

namespace rankone {

namespace {

void check_length(const BigInt& length, std::uint64_t limit, Stage n) {
    if (length > limit) {
        throw Error(ErrorKind::SizeLimitExceeded, "v_" + std::to_string(n) + " is longer than " +
                                                      std::to_string(limit) + " symbols");
    }
}

// One generating step; `blocks` (positions of tracked sub-blocks inside
// `word`) is carried into every copy.
std::string expand(const StageParams& p, const std::string& word, std::vector<std::uint64_t>* blocks,
                   std::uint64_t limit, Stage target) {
    const auto spacers = p.dense_spacers(limit);
    std::string next;
    std::vector<std::uint64_t> next_blocks;
    for (const auto& s : spacers) {
        if (blocks) {
            for (auto b : *blocks) next_blocks.push_back(next.size() + b);
        }
        check_length(BigInt(next.size() + word.size()), limit, target);
        next += word;
        check_length(next.size() + s, limit, target);
        next.append(s.convert_to<std::size_t>(), '1');
    }
    if (blocks) *blocks = std::move(next_blocks);
    return next;
}

}  // namespace

RankOneWord generate_word(const RankOneSpec& spec, Stage n, std::uint64_t length_limit) {
    std::string word = "0";
    for (Stage j = 0; j < n; ++j) word = expand(spec.stage(j), word, nullptr, length_limit, n);
    return {n, std::move(word)};
}

std::vector<std::uint64_t> canonical_occurrences(const RankOneSpec& spec, Stage m, Stage n,
                                                 std::uint64_t length_limit) {
    if (n < m) throw Error(ErrorKind::InvalidSpec, "canonical occurrences need n >= m");
    std::string word = generate_word(spec, m, length_limit).symbols;
    std::vector<std::uint64_t> blocks{0};
    for (Stage j = m; j < n; ++j) word = expand(spec.stage(j), word, &blocks, length_limit, n);
    return blocks;
}

}  // namespace rankone
