#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vlg/error.hpp"

namespace vlg {

// Knuth-Morris-Pratt matcher. The failure table is built once per needle so
// the matcher can be run over many short windows.
class kmp_matcher {
public:
    explicit kmp_matcher(std::string_view needle) : needle_(needle), fail_(needle.size() + 1, 0) {
        if (needle.empty())
            throw invalid_argument("empty needle");
        // fail_[q] = length of the longest proper border of needle[0..q)
        std::size_t k = 0;
        for (std::size_t q = 1; q < needle_.size(); ++q) {
            while (k > 0 && needle_[q] != needle_[k])
                k = fail_[k];
            if (needle_[q] == needle_[k])
                ++k;
            fail_[q + 1] = k;
        }
    }

    const std::string& needle() const noexcept { return needle_; }

    // Calls on_match(offset) for every (possibly overlapping) occurrence in hay,
    // in ascending order. Stops early if on_match returns false.
    template <typename F>
    void scan(std::string_view hay, F&& on_match) const {
        const std::size_t m = needle_.size();
        std::size_t q = 0;
        for (std::size_t i = 0; i < hay.size(); ++i) {
            while (q > 0 && hay[i] != needle_[q])
                q = fail_[q];
            if (hay[i] == needle_[q])
                ++q;
            if (q == m) {
                if (!on_match(i + 1 - m))
                    return;
                q = fail_[q];
            }
        }
    }

    std::vector<std::size_t> find_all(std::string_view hay) const {
        std::vector<std::size_t> out;
        scan(hay, [&](std::size_t off) {
            out.push_back(off);
            return true;
        });
        return out;
    }

private:
    std::string needle_;
    std::vector<std::size_t> fail_;
};

inline std::vector<std::size_t> kmp_search(std::string_view hay, std::string_view needle) {
    return kmp_matcher(needle).find_all(hay);
}

} // namespace vlg
