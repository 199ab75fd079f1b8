#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlg/detail/sais.hpp"
#include "vlg/error.hpp"

namespace vlg {

using pos_t = std::uint64_t;

// Largest text the on-disk format can describe (positions fit in 5 bytes).
inline constexpr std::uint64_t max_text_length = (std::uint64_t{1} << 40) - 1;

// Inclusive rank range [start, end] of the suffix array. Empty when start > end.
struct sa_interval {
    std::size_t start = 1;
    std::size_t end = 0;

    bool empty() const noexcept { return start > end; }
    std::size_t size() const noexcept { return empty() ? 0 : end - start + 1; }

    friend bool operator==(const sa_interval&, const sa_interval&) = default;
};

inline std::vector<pos_t> build_suffix_array(std::string_view text) {
    if (text.size() > max_text_length)
        throw capacity_error("text of " + std::to_string(text.size()) +
                             " bytes exceeds the 2^40 byte limit");
    std::vector<pos_t> sa(text.size());
    if (text.size() <= 0xFFFFFFFEu) {
        std::vector<std::uint32_t> narrow(text.size());
        detail::sais_builder<std::uint32_t>::run(
            reinterpret_cast<const unsigned char*>(text.data()), narrow.data(),
            static_cast<std::uint32_t>(text.size()), 256u);
        std::copy(narrow.begin(), narrow.end(), sa.begin());
    } else {
        detail::sais_builder<pos_t>::run(reinterpret_cast<const unsigned char*>(text.data()),
                                         sa.data(), static_cast<pos_t>(text.size()), pos_t{256});
    }
    return sa;
}

namespace detail {

// Three-way comparison of the suffix at `pos` truncated to |sub| bytes against sub.
inline int compare_prefix(std::string_view text, pos_t pos, std::string_view sub) {
    std::size_t avail = text.size() - pos;
    std::size_t len = avail < sub.size() ? avail : sub.size();
    int c = std::memcmp(text.data() + pos, sub.data(), len);
    if (c != 0)
        return c;
    return len < sub.size() ? -1 : 0;
}

} // namespace detail

inline sa_interval find_interval(std::span<const pos_t> sa, std::string_view text,
                                 std::string_view sub) {
    if (sub.empty())
        throw invalid_argument("empty subpattern");
    // lower bound: first rank whose suffix prefix is >= sub
    std::size_t lo = 0, hi = sa.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (detail::compare_prefix(text, sa[mid], sub) < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    std::size_t first = lo;
    hi = sa.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (detail::compare_prefix(text, sa[mid], sub) <= 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (first == lo)
        return {};
    return {first, lo - 1};
}

inline std::vector<pos_t> extract_positions(std::span<const pos_t> sa, sa_interval iv) {
    if (iv.empty())
        return {};
    return {sa.begin() + static_cast<std::ptrdiff_t>(iv.start),
            sa.begin() + static_cast<std::ptrdiff_t>(iv.end) + 1};
}

// Immutable text plus its suffix array. Safe for concurrent readers.
class text_index {
public:
    text_index() = default;

    explicit text_index(std::string text) : text_(std::move(text)), sa_(build_suffix_array(text_)) {}

    // Adopts a previously built suffix array (e.g. one read from disk). Not re-validated.
    text_index(std::string text, std::vector<pos_t> sa) : text_(std::move(text)), sa_(std::move(sa)) {
        if (sa_.size() != text_.size())
            throw invalid_argument("suffix array length does not match text length");
    }

    std::string_view text() const noexcept { return text_; }
    std::span<const pos_t> sa() const noexcept { return sa_; }
    std::size_t size() const noexcept { return text_.size(); }

    sa_interval find(std::string_view sub) const { return find_interval(sa_, text_, sub); }

    std::vector<pos_t> positions(sa_interval iv) const { return extract_positions(sa_, iv); }
    std::span<const pos_t> view(sa_interval iv) const {
        if (iv.empty())
            return {};
        return std::span<const pos_t>(sa_).subspan(iv.start, iv.size());
    }

    friend bool operator==(const text_index&, const text_index&) = default;

private:
    std::string text_;
    std::vector<pos_t> sa_;
};

} // namespace vlg
