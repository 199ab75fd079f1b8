#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vlg/error.hpp"
#include "vlg/text_index.hpp"

namespace vlg {

// One bit per block of b consecutive text positions. A set bit means the
// block may contain a partner occurrence; a clear bit rules the block out.
class block_filter {
public:
    block_filter(std::size_t text_length, std::size_t block_size)
        : n_(text_length), block_(block_size) {
        if (block_size == 0 || !std::has_single_bit(block_size))
            throw invalid_argument("block size must be a power of two, got " + std::to_string(block_size));
        shift_ = static_cast<unsigned>(std::countr_zero(block_size));
        bits_ = (n_ + block_ - 1) >> shift_;
        words_.assign((bits_ + 63) / 64, 0);
    }

    std::size_t text_length() const noexcept { return n_; }
    std::size_t block_size() const noexcept { return block_; }
    std::size_t size() const noexcept { return bits_; }

    bool test_block(std::size_t bit) const { return (words_[bit >> 6] >> (bit & 63)) & 1u; }
    bool admits(pos_t position) const { return test_block(static_cast<std::size_t>(position >> shift_)); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    // Marks blocks covering [i + min_gap, i + max_gap] for every i, clamped to the text.
    void mark_forward(std::span<const pos_t> positions, pos_t min_gap, pos_t max_gap) {
        if (n_ == 0)
            return;
        const pos_t last = n_ - 1;
        for (std::size_t idx = 0; idx < positions.size(); ++idx) {
            const pos_t i = positions[idx];
            if (idx + prefetch_distance < positions.size())
                prefetch_block(positions[idx + prefetch_distance] + min_gap);
            if (min_gap > last || i > last - min_gap)
                continue;
            pos_t lo = i + min_gap;
            pos_t hi = (max_gap > last || i > last - max_gap) ? last : i + max_gap;
            set_range(lo, hi);
        }
    }

    // Marks blocks covering [i - max_gap, i - min_gap] for every i, clamped below at 0.
    void mark_backward(std::span<const pos_t> positions, pos_t min_gap, pos_t max_gap) {
        if (n_ == 0)
            return;
        const pos_t last = n_ - 1;
        for (std::size_t idx = 0; idx < positions.size(); ++idx) {
            const pos_t i = positions[idx];
            if (idx + prefetch_distance < positions.size()) {
                pos_t ahead = positions[idx + prefetch_distance];
                prefetch_block(ahead < max_gap ? 0 : ahead - max_gap);
            }
            if (i < min_gap)
                continue;
            pos_t hi = std::min(i - min_gap, last);
            pos_t lo = i < max_gap ? 0 : i - max_gap;
            set_range(lo, hi);
        }
    }

    // Candidates whose block is marked, input order preserved.
    std::vector<pos_t> prune(std::span<const pos_t> candidates) const {
        std::vector<pos_t> out;
        prune_into(candidates, out);
        return out;
    }

    void prune_into(std::span<const pos_t> candidates, std::vector<pos_t>& out) const {
        out.clear();
        const std::size_t count = candidates.size();
        for (std::size_t idx = 0; idx < count; ++idx) {
            if (idx + prefetch_distance < count)
                prefetch_block(candidates[idx + prefetch_distance]);
            if (admits(candidates[idx]))
                out.push_back(candidates[idx]);
        }
    }

    // Zeroes only the words marked since the last clear when few were touched.
    void clear() {
        if (touched_overflow_) {
            std::fill(words_.begin(), words_.end(), std::uint64_t{0});
        } else {
            for (auto w : touched_)
                words_[w] = 0;
        }
        touched_.clear();
        touched_overflow_ = false;
    }

private:
    // Sets bits [lo/b, hi/b] a word at a time. The cost per marked occurrence
    // still grows with (max_gap - min_gap) / b, which is what makes large
    // blocks pay off for wide gaps.
    void set_range(pos_t lo, pos_t hi) {
        const std::size_t first = static_cast<std::size_t>(lo >> shift_);
        const std::size_t last = static_cast<std::size_t>(hi >> shift_);
        const std::size_t w_first = first >> 6, w_last = last >> 6;
        const std::uint64_t head = ~std::uint64_t{0} << (first & 63);
        const std::uint64_t tail = ~std::uint64_t{0} >> (63 - (last & 63));
        if (w_first == w_last) {
            or_word(w_first, head & tail);
            return;
        }
        or_word(w_first, head);
        for (std::size_t w = w_first + 1; w < w_last; ++w)
            or_word(w, ~std::uint64_t{0});
        or_word(w_last, tail);
    }

    void or_word(std::size_t w, std::uint64_t mask) {
        std::uint64_t& word = words_[w];
        if (word == 0 && !touched_overflow_) [[unlikely]] {
            if (touched_.size() < words_.size() / 16)
                touched_.push_back(w);
            else
                touched_overflow_ = true;
        }
        word |= mask;
    }

    void prefetch_block(pos_t position) const {
        std::size_t word = static_cast<std::size_t>(position >> shift_) >> 6;
        if (word < words_.size())
            __builtin_prefetch(&words_[word]);
    }

    static constexpr std::size_t prefetch_distance = 16;

    std::size_t n_;
    std::size_t block_;
    unsigned shift_ = 0;
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::size_t> touched_; // nonzero words, until it would exceed 1/16 of words_
    bool touched_overflow_ = false;
};

inline constexpr std::size_t default_filter_budget_bits = std::size_t{16} << 23; // 16 MiB

// Smallest power of two b with ceil(n/b) <= budget_bits and
// ceil((max_gap - min_gap) / b) <= 4 bits set per occurrence.
inline std::size_t default_block_size(std::size_t text_length, pos_t min_gap, pos_t max_gap,
                                      std::size_t budget_bits = default_filter_budget_bits) {
    const pos_t width = max_gap >= min_gap ? max_gap - min_gap : 0;
    std::size_t b = 1;
    while (b < (std::size_t{1} << 62)) {
        bool fits = (text_length + b - 1) / b <= budget_bits;
        bool cheap = (width + b - 1) / b <= 4;
        if (fits && cheap)
            break;
        b <<= 1;
    }
    return b;
}

} // namespace vlg
