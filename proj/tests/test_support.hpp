#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "vlg/random.hpp"
#include "vlg/text_index.hpp"

namespace vlg::testing {

inline std::string random_text(xoshiro256ss& rng, std::size_t n, unsigned alphabet) {
    std::string s(n, '\0');
    for (auto& c : s)
        c = static_cast<char>(alphabet >= 256 ? rng.below(256) : 'a' + rng.below(alphabet));
    return s;
}

inline std::string periodic_text(std::string_view unit, std::size_t n) {
    std::string s;
    s.reserve(n);
    while (s.size() < n)
        s.push_back(unit[s.size() % unit.size()]);
    return s;
}

// Comparison sort of all suffixes; unsigned bytes, shorter prefix first.
inline std::vector<vlg::pos_t> naive_suffix_array(std::string_view text) {
    std::vector<vlg::pos_t> sa(text.size());
    std::iota(sa.begin(), sa.end(), vlg::pos_t{0});
    auto as_unsigned = [&](vlg::pos_t p) {
        auto s = text.substr(p);
        return std::basic_string_view<unsigned char>(reinterpret_cast<const unsigned char*>(s.data()), s.size());
    };
    std::sort(sa.begin(), sa.end(), [&](vlg::pos_t a, vlg::pos_t b) { return as_unsigned(a) < as_unsigned(b); });
    return sa;
}

// Occurrence positions of sub, ascending.
inline std::vector<vlg::pos_t> naive_find(std::string_view text, std::string_view sub) {
    std::vector<vlg::pos_t> out;
    for (std::size_t i = 0; i + sub.size() <= text.size(); ++i)
        if (text.compare(i, sub.size(), sub) == 0)
            out.push_back(i);
    return out;
}

// Brute-force {j in b : exists i in a, i+lo <= j <= i+hi}, ascending.
inline std::vector<vlg::pos_t> brute_window(const std::vector<vlg::pos_t>& a, const std::vector<vlg::pos_t>& b,
                                            vlg::pos_t lo, vlg::pos_t hi) {
    std::vector<vlg::pos_t> out;
    for (auto j : b)
        for (auto i : a)
            if (i + lo <= j && j <= i + hi) {
                out.push_back(j);
                break;
            }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace vlg::testing
