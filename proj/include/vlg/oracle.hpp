#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string_view>
#include <vector>

#include "vlg/match_engine.hpp"
#include "vlg/pattern.hpp"

// Reference VLG matcher that shares no code path with the indexed engine:
// occurrences by direct comparison at every text position, chain reachability
// by per-level dynamic programming over prefix sums, tuples by exhaustive
// depth-first enumeration. Linear memory per level; meant for verification.
namespace vlg {

namespace detail {

inline std::vector<char> naive_occurrences(std::string_view text, std::string_view sub) {
    std::vector<char> occ(text.size(), 0);
    if (sub.empty() || sub.size() > text.size())
        return occ;
    for (std::size_t i = 0; i + sub.size() <= text.size(); ++i)
        occ[i] = std::memcmp(text.data() + i, sub.data(), sub.size()) == 0;
    return occ;
}

// prefix[x] = number of set flags in [0, x)
inline std::vector<std::uint64_t> prefix_counts(const std::vector<char>& flags) {
    std::vector<std::uint64_t> prefix(flags.size() + 1, 0);
    for (std::size_t x = 0; x < flags.size(); ++x)
        prefix[x + 1] = prefix[x] + static_cast<std::uint64_t>(flags[x] != 0);
    return prefix;
}

// Any flag set in the closed range [lo, hi] (signed bounds, clamped to the array).
inline bool any_in(const std::vector<std::uint64_t>& prefix, std::int64_t lo, std::int64_t hi) {
    const std::int64_t n = static_cast<std::int64_t>(prefix.size()) - 1;
    if (lo < 0)
        lo = 0;
    if (hi > n - 1)
        hi = n - 1;
    if (lo > hi)
        return false;
    return prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)] > 0;
}

} // namespace detail

inline match_result oracle_search(std::string_view text, const vlg_pattern& pattern, bool want_tuples = false,
                                  std::size_t tuple_cap = std::numeric_limits<std::size_t>::max()) {
    pattern.validate();
    const std::size_t k = pattern.k();
    const std::int64_t n = static_cast<std::int64_t>(text.size());

    // reach[j][y]: p_j occurs at y and some chain from p_0 ends there.
    std::vector<std::vector<char>> reach(k);
    reach[0] = detail::naive_occurrences(text, pattern.subpatterns[0]);
    for (std::size_t j = 1; j < k; ++j) {
        auto prefix = detail::prefix_counts(reach[j - 1]);
        auto occ = detail::naive_occurrences(text, pattern.subpatterns[j]);
        const auto lo_gap = static_cast<std::int64_t>(pattern.gaps[j - 1].min_gap);
        const auto hi_gap = static_cast<std::int64_t>(pattern.gaps[j - 1].max_gap);
        for (std::int64_t y = 0; y < n; ++y)
            if (occ[static_cast<std::size_t>(y)] && !detail::any_in(prefix, y - hi_gap, y - lo_gap))
                occ[static_cast<std::size_t>(y)] = 0;
        reach[j] = std::move(occ);
    }

    match_result result;
    for (std::int64_t y = 0; y < n; ++y)
        if (reach[k - 1][static_cast<std::size_t>(y)])
            result.endpoints.push_back(static_cast<pos_t>(y));
    if (!want_tuples)
        return result;

    // live[j][x]: reach[j][x] and the chain can be completed to the right.
    std::vector<std::vector<char>> live = reach;
    for (std::size_t j = k - 1; j-- > 0;) {
        auto prefix = detail::prefix_counts(live[j + 1]);
        const auto lo_gap = static_cast<std::int64_t>(pattern.gaps[j].min_gap);
        const auto hi_gap = static_cast<std::int64_t>(pattern.gaps[j].max_gap);
        for (std::int64_t x = 0; x < n; ++x)
            if (live[j][static_cast<std::size_t>(x)] && !detail::any_in(prefix, x + lo_gap, x + hi_gap))
                live[j][static_cast<std::size_t>(x)] = 0;
    }

    std::vector<pos_t> tuple(k);
    bool stop = false;
    auto walk = [&](auto&& self, std::size_t j, std::int64_t x) -> void {
        tuple[j] = static_cast<pos_t>(x);
        if (j + 1 == k) {
            if (result.tuples.size() >= tuple_cap) {
                result.truncated = true;
                stop = true;
                return;
            }
            result.tuples.push_back(tuple);
            return;
        }
        const auto lo = x + static_cast<std::int64_t>(pattern.gaps[j].min_gap);
        const auto hi = std::min(n - 1, x + static_cast<std::int64_t>(pattern.gaps[j].max_gap));
        for (std::int64_t y = lo; y <= hi && !stop; ++y)
            if (live[j + 1][static_cast<std::size_t>(y)])
                self(self, j + 1, y);
    };
    for (std::int64_t x = 0; x < n && !stop; ++x)
        if (live[0][static_cast<std::size_t>(x)])
            walk(walk, 0, x);
    return result;
}

// Number of complete tuples, by counting paths level by level (saturating).
inline std::uint64_t oracle_count_tuples(std::string_view text, const vlg_pattern& pattern) {
    pattern.validate();
    const std::size_t k = pattern.k();
    const std::int64_t n = static_cast<std::int64_t>(text.size());
    constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 4;

    auto occ0 = detail::naive_occurrences(text, pattern.subpatterns[0]);
    std::vector<std::uint64_t> ways(text.size());
    for (std::size_t x = 0; x < text.size(); ++x)
        ways[x] = occ0[x] ? 1 : 0;
    for (std::size_t j = 1; j < k; ++j) {
        std::vector<std::uint64_t> prefix(text.size() + 1, 0);
        for (std::size_t x = 0; x < text.size(); ++x)
            prefix[x + 1] = std::min(cap, prefix[x] + ways[x]);
        auto occ = detail::naive_occurrences(text, pattern.subpatterns[j]);
        const auto lo_gap = static_cast<std::int64_t>(pattern.gaps[j - 1].min_gap);
        const auto hi_gap = static_cast<std::int64_t>(pattern.gaps[j - 1].max_gap);
        std::vector<std::uint64_t> next(text.size(), 0);
        for (std::int64_t y = 0; y < n; ++y) {
            if (!occ[static_cast<std::size_t>(y)])
                continue;
            std::int64_t lo = std::max<std::int64_t>(0, y - hi_gap), hi = y - lo_gap;
            if (lo > hi)
                continue;
            std::uint64_t a = prefix[static_cast<std::size_t>(hi + 1)], b = prefix[static_cast<std::size_t>(lo)];
            next[static_cast<std::size_t>(y)] = a >= cap ? cap : a - b;
        }
        ways = std::move(next);
    }
    std::uint64_t total = 0;
    for (auto w : ways)
        total = std::min(cap, total + w);
    return total;
}

} // namespace vlg
