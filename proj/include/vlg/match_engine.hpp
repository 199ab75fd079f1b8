#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlg/block_filter.hpp"
#include "vlg/error.hpp"
#include "vlg/kmp.hpp"
#include "vlg/pattern.hpp"
#include "vlg/radix_sort.hpp"
#include "vlg/text_index.hpp"

namespace vlg {

enum class strategy {
    baseline_sort, // std::sort both sides, then merge
    radix_sort,    // LSD radix sort both sides, then merge
    filter_sort,   // block filter prunes, survivors radix sorted and merged
    text_check,    // scan text windows around the smaller side with KMP
    automatic,     // cost model picks text_check or filter_sort per adjacency
};

inline std::string_view to_string(strategy s) {
    switch (s) {
    case strategy::baseline_sort: return "baseline";
    case strategy::radix_sort: return "radix";
    case strategy::filter_sort: return "filter";
    case strategy::text_check: return "textcheck";
    case strategy::automatic: return "auto";
    }
    return "?";
}

inline std::optional<strategy> parse_strategy(std::string_view name) {
    for (auto s : {strategy::baseline_sort, strategy::radix_sort, strategy::filter_sort,
                   strategy::text_check, strategy::automatic})
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

struct match_result {
    std::vector<pos_t> endpoints;          // ascending, distinct starts of the last subpattern
    std::vector<std::vector<pos_t>> tuples; // lexicographic order, only when requested
    bool truncated = false;                 // more tuples exist beyond the cap

    friend bool operator==(const match_result&, const match_result&) = default;
};

// ---------------------------------------------------------------------------
// Pairwise combiners
// ---------------------------------------------------------------------------

// {j in b : exists i in a with i + min_gap <= j <= i + max_gap}, both inputs
// ascending. Each element of b is emitted at most once: once consumed by a
// window it is never revisited for a later window.
inline std::vector<pos_t> intersect_gapped(std::span<const pos_t> a, std::span<const pos_t> b,
                                           pos_t min_gap, pos_t max_gap) {
    std::vector<pos_t> out;
    const std::size_t na = a.size(), nb = b.size();
    for (std::size_t i = 0, j = 0; i < na && j < nb; ++i) {
        const pos_t lo = a[i] + min_gap, hi = a[i] + max_gap;
        while (j < nb && b[j] < lo)
            ++j;
        while (j < nb && b[j] <= hi)
            out.push_back(b[j++]);
    }
    return out;
}

// Mirror of intersect_gapped: {i in a : exists j in b with i + min_gap <= j <= i + max_gap}.
inline std::vector<pos_t> having_successor(std::span<const pos_t> a, std::span<const pos_t> b,
                                           pos_t min_gap, pos_t max_gap) {
    std::vector<pos_t> out;
    const std::size_t nb = b.size();
    std::size_t j = 0;
    for (pos_t i : a) {
        while (j < nb && b[j] < i + min_gap)
            ++j;
        if (j == nb)
            break;
        if (b[j] <= i + max_gap)
            out.push_back(i);
    }
    return out;
}

inline constexpr std::size_t text_prefetch_distance = 8;

// Occurrences of next_sub starting in [i + min_gap, i + max_gap] for some
// anchor i, found by scanning the text. Anchors must be ascending; windows of
// consecutive anchors are merged so each start position is examined once.
inline std::vector<pos_t> text_check_forward(std::span<const pos_t> anchors, std::string_view text,
                                             const kmp_matcher& next, pos_t min_gap, pos_t max_gap) {
    std::vector<pos_t> out;
    const pos_t n = text.size();
    const pos_t m = next.needle().size();
    if (m > n)
        return out;
    const pos_t last_start = n - m;
    pos_t scan_from = 0;
    for (std::size_t idx = 0; idx < anchors.size(); ++idx) {
        const pos_t i = anchors[idx];
        if (idx + text_prefetch_distance < anchors.size()) {
            pos_t ahead = anchors[idx + text_prefetch_distance] + min_gap;
            if (ahead < n)
                __builtin_prefetch(text.data() + ahead);
        }
        if (min_gap > last_start || i > last_start - min_gap)
            break; // later anchors only push the window further right
        pos_t lo = std::max(i + min_gap, scan_from);
        pos_t hi = (max_gap > last_start || i > last_start - max_gap) ? last_start : i + max_gap;
        if (lo > hi)
            continue;
        next.scan(text.substr(lo, hi - lo + m), [&](std::size_t off) {
            out.push_back(lo + off);
            return true;
        });
        scan_from = hi + 1;
    }
    return out;
}

inline std::vector<pos_t> text_check_forward(std::span<const pos_t> anchors, std::string_view text,
                                             std::string_view next_sub, pos_t min_gap, pos_t max_gap) {
    return text_check_forward(anchors, text, kmp_matcher(next_sub), min_gap, max_gap);
}

// Anchors j (occurrences of the later subpattern, ascending) for which prev
// occurs at some i with i + min_gap <= j <= i + max_gap.
inline std::vector<pos_t> text_check_backward(std::span<const pos_t> anchors, std::string_view text,
                                              const kmp_matcher& prev, pos_t min_gap, pos_t max_gap) {
    std::vector<pos_t> out;
    const pos_t n = text.size();
    const pos_t m = prev.needle().size();
    if (m > n)
        return out;
    const pos_t last_start = n - m;
    for (std::size_t idx = 0; idx < anchors.size(); ++idx) {
        const pos_t j = anchors[idx];
        if (idx + text_prefetch_distance < anchors.size()) {
            pos_t ahead = anchors[idx + text_prefetch_distance];
            __builtin_prefetch(text.data() + (ahead < max_gap ? 0 : ahead - max_gap));
        }
        if (j < min_gap)
            continue;
        pos_t lo = j < max_gap ? 0 : j - max_gap;
        pos_t hi = std::min(j - min_gap, last_start);
        if (lo > hi)
            continue;
        bool hit = false;
        prev.scan(text.substr(lo, hi - lo + m), [&](std::size_t) {
            hit = true;
            return false;
        });
        if (hit)
            out.push_back(j);
    }
    return out;
}

inline std::vector<pos_t> text_check_backward(std::span<const pos_t> anchors, std::string_view text,
                                              std::string_view prev_sub, pos_t min_gap, pos_t max_gap) {
    return text_check_backward(anchors, text, kmp_matcher(prev_sub), min_gap, max_gap);
}

enum class filter_direction {
    forward,  // small side precedes the large side in the pattern
    backward, // small side follows the large side
};

struct filtered_pair {
    std::vector<pos_t> small;
    std::vector<pos_t> large;
    bool second_round = false;
};

// Marks the filter from pos_small, prunes pos_large through it, and when
// fewer than |pos_small|/2 candidates survive, re-marks from the survivors in
// the opposite direction to prune pos_small as well. Both outputs keep their
// input order. `filter` is cleared first and reused.
inline filtered_pair filter_pair(std::span<const pos_t> pos_small, std::span<const pos_t> pos_large,
                                 filter_direction direction, pos_t min_gap, pos_t max_gap,
                                 block_filter& filter) {
    filtered_pair r;
    filter.clear();
    if (direction == filter_direction::forward)
        filter.mark_forward(pos_small, min_gap, max_gap);
    else
        filter.mark_backward(pos_small, min_gap, max_gap);
    filter.prune_into(pos_large, r.large);

    if (2 * r.large.size() < pos_small.size()) {
        r.second_round = true;
        filter.clear();
        if (direction == filter_direction::forward)
            filter.mark_backward(r.large, min_gap, max_gap);
        else
            filter.mark_forward(r.large, min_gap, max_gap);
        filter.prune_into(pos_small, r.small);
    } else {
        r.small.assign(pos_small.begin(), pos_small.end());
    }
    return r;
}

inline filtered_pair filter_pair(std::span<const pos_t> pos_small, std::span<const pos_t> pos_large,
                                 filter_direction direction, pos_t min_gap, pos_t max_gap,
                                 std::size_t block_size, std::size_t text_length) {
    block_filter filter(text_length, block_size);
    return filter_pair(pos_small, pos_large, direction, min_gap, max_gap, filter);
}

inline constexpr double default_sort_cost = 4.0;

// Cost model: scanning text windows costs min(occ) * (gap width + m), the
// sort path costs sort_cost * (occ_a + occ_b).
inline strategy plan_pair(std::uint64_t occ_a, std::uint64_t occ_b, std::size_t m_next, pos_t min_gap,
                          pos_t max_gap, double sort_cost = default_sort_cost) {
    if (occ_a == 0 || occ_b == 0)
        return strategy::text_check;
    double window = static_cast<double>(max_gap - min_gap) + static_cast<double>(m_next);
    double check = static_cast<double>(std::min(occ_a, occ_b)) * window;
    double sorting = sort_cost * (static_cast<double>(occ_a) + static_cast<double>(occ_b));
    return check < sorting ? strategy::text_check : strategy::filter_sort;
}

// ---------------------------------------------------------------------------
// Query driver
// ---------------------------------------------------------------------------

struct search_options {
    strategy kind = strategy::automatic;
    bool want_tuples = false;
    std::size_t tuple_cap = std::numeric_limits<std::size_t>::max();
    std::size_t block_size = 0; // 0 picks default_block_size per adjacency
    std::size_t filter_budget_bits = default_filter_budget_bits;
    double sort_cost = default_sort_cost;
};

// Candidate counts summed over adjacencies. stage0: positions entering each
// combine; stage1: positions materialized after pruning; stage2: output.
struct search_stats {
    std::uint64_t stage0 = 0;
    std::uint64_t stage1 = 0;
    std::uint64_t stage2 = 0;
    std::vector<strategy> chosen; // concrete strategy per adjacency actually run
    bool short_circuited = false;
};

namespace detail {

// One filter per thread, reused across queries so its bitmap is allocated and
// faulted in once; filter_pair clears it before use. Queries on different
// threads never share one.
inline block_filter& scratch_filter(std::size_t text_length, std::size_t block_size) {
    thread_local std::optional<block_filter> cached;
    if (!cached || cached->text_length() != text_length || cached->block_size() != block_size)
        cached.emplace(text_length, block_size);
    return *cached;
}

class query_runner {
public:
    query_runner(const text_index& index, const vlg_pattern& pattern, const search_options& opts,
                 search_stats& stats)
        : index_(index), pattern_(pattern), opts_(opts), stats_(stats) {}

    match_result run() {
        pattern_.validate();
        const pos_t n = index_.size();
        for (const auto& g : pattern_.gaps)
            if (g.max_gap >= n)
                throw invalid_argument("gap upper bound " + std::to_string(g.max_gap) +
                                       " must be below the text length " + std::to_string(n));

        const std::size_t k = pattern_.k();
        std::vector<sa_interval> intervals(k);
        for (std::size_t i = 0; i < k; ++i) {
            intervals[i] = index_.find(pattern_.subpatterns[i]);
            if (intervals[i].empty()) {
                stats_.short_circuited = true;
                return {};
            }
        }

        // The first anchor set stays a view into the suffix array until a
        // strategy needs its own sorted copy.
        view_ = index_.view(intervals[0]);
        anchors_are_view_ = true;
        anchors_sorted_ = false;
        if (k == 1 || opts_.want_tuples)
            sort_anchors(opts_.kind == strategy::baseline_sort);
        if (opts_.want_tuples)
            levels_.push_back(anchors_);

        for (std::size_t j = 0; j + 1 < k; ++j) {
            combine(j, index_.view(intervals[j + 1]));
            if (opts_.want_tuples)
                levels_.push_back(anchors_);
            if (anchors_.empty()) {
                stats_.short_circuited = j + 2 < k;
                return {};
            }
        }

        match_result result;
        result.endpoints = std::move(anchors_);
        if (opts_.want_tuples)
            enumerate_tuples(result);
        return result;
    }

private:
    std::span<const pos_t> anchors() const { return anchors_are_view_ ? view_ : std::span<const pos_t>(anchors_); }

    void sort_anchors(bool comparison) {
        if (anchors_sorted_)
            return;
        if (anchors_are_view_) {
            anchors_.assign(view_.begin(), view_.end());
            anchors_are_view_ = false;
        }
        sort_positions(anchors_, comparison);
        anchors_sorted_ = true;
    }

    void sort_positions(std::vector<pos_t>& v, bool comparison) {
        if (comparison)
            std::sort(v.begin(), v.end());
        else
            radix_sort(v, scratch_);
    }

    void combine(std::size_t level, std::span<const pos_t> next_occ) {
        const gap_constraint gap = pattern_.gaps[level];
        strategy kind = opts_.kind;
        const bool forward = anchors().size() <= next_occ.size();
        if (kind == strategy::automatic) {
            const auto& searched = forward ? pattern_.subpatterns[level + 1] : pattern_.subpatterns[level];
            kind = plan_pair(anchors().size(), next_occ.size(), searched.size(), gap.min_gap, gap.max_gap,
                             opts_.sort_cost);
        }
        stats_.chosen.push_back(kind);
        stats_.stage0 += anchors().size() + next_occ.size();

        std::vector<pos_t> out;
        switch (kind) {
        case strategy::baseline_sort:
        case strategy::radix_sort: {
            const bool comparison = kind == strategy::baseline_sort;
            sort_anchors(comparison);
            std::vector<pos_t> next(next_occ.begin(), next_occ.end());
            sort_positions(next, comparison);
            stats_.stage1 += anchors_.size() + next.size();
            out = intersect_gapped(anchors_, next, gap.min_gap, gap.max_gap);
            break;
        }
        case strategy::filter_sort: {
            std::size_t b = opts_.block_size != 0
                                ? opts_.block_size
                                : default_block_size(index_.size(), gap.min_gap, gap.max_gap,
                                                     opts_.filter_budget_bits);
            block_filter& filter = scratch_filter(index_.size(), b);
            filtered_pair fp = forward ? filter_pair(anchors(), next_occ, filter_direction::forward,
                                                     gap.min_gap, gap.max_gap, filter)
                                       : filter_pair(next_occ, anchors(), filter_direction::backward,
                                                     gap.min_gap, gap.max_gap, filter);
            std::vector<pos_t>& kept_anchors = forward ? fp.small : fp.large;
            std::vector<pos_t>& kept_next = forward ? fp.large : fp.small;
            stats_.stage1 += kept_anchors.size() + kept_next.size();
            // pruning preserves order, so sorted anchors stay sorted
            if (!anchors_sorted_)
                radix_sort(kept_anchors, scratch_);
            radix_sort(kept_next, scratch_);
            out = intersect_gapped(kept_anchors, kept_next, gap.min_gap, gap.max_gap);
            break;
        }
        case strategy::text_check:
        case strategy::automatic: {
            if (forward) {
                sort_anchors(false);
                out = text_check_forward(anchors_, index_.text(), kmp_matcher(pattern_.subpatterns[level + 1]),
                                         gap.min_gap, gap.max_gap);
                stats_.stage1 += anchors_.size() + out.size();
            } else {
                std::vector<pos_t> next(next_occ.begin(), next_occ.end());
                radix_sort(next, scratch_);
                out = text_check_backward(next, index_.text(), kmp_matcher(pattern_.subpatterns[level]),
                                          gap.min_gap, gap.max_gap);
                if (level == 0) {
                    // anchors are every occurrence of p_0, so a text hit is a valid predecessor
                    stats_.stage1 += next.size() + out.size();
                } else {
                    // a text hit must also be a surviving anchor
                    sort_anchors(false);
                    out = intersect_gapped(anchors_, out, gap.min_gap, gap.max_gap);
                    stats_.stage1 += next.size() + anchors_.size();
                }
            }
            break;
        }
        }
        stats_.stage2 += out.size();
        assert(std::is_sorted(out.begin(), out.end()) &&
               std::adjacent_find(out.begin(), out.end()) == out.end());
        anchors_ = std::move(out);
        anchors_are_view_ = false;
        anchors_sorted_ = true;
    }

    void enumerate_tuples(match_result& result) {
        const std::size_t k = pattern_.k();
        // Keep only positions that extend to a full chain on the right.
        for (std::size_t j = k - 1; j-- > 0;)
            levels_[j] = having_successor(levels_[j], levels_[j + 1], pattern_.gaps[j].min_gap,
                                          pattern_.gaps[j].max_gap);
        std::vector<pos_t> current(k);
        bool stop = false;
        auto dfs = [&](auto&& self, std::size_t level, pos_t pos) -> void {
            current[level] = pos;
            if (level + 1 == k) {
                if (result.tuples.size() >= opts_.tuple_cap) {
                    result.truncated = true;
                    stop = true;
                    return;
                }
                result.tuples.push_back(current);
                return;
            }
            const auto& g = pattern_.gaps[level];
            const auto& next = levels_[level + 1];
            auto it = std::lower_bound(next.begin(), next.end(), pos + g.min_gap);
            for (; it != next.end() && *it <= pos + g.max_gap && !stop; ++it)
                self(self, level + 1, *it);
        };
        for (pos_t p : levels_[0]) {
            if (stop)
                break;
            dfs(dfs, 0, p);
        }
    }

    const text_index& index_;
    const vlg_pattern& pattern_;
    const search_options& opts_;
    search_stats& stats_;

    std::span<const pos_t> view_;
    bool anchors_are_view_ = false;
    std::vector<pos_t> anchors_;
    bool anchors_sorted_ = false;
    std::vector<pos_t> scratch_;
    std::vector<std::vector<pos_t>> levels_;
};

} // namespace detail

inline match_result search(const text_index& index, const vlg_pattern& pattern, const search_options& opts,
                           search_stats* stats = nullptr) {
    search_stats local;
    return detail::query_runner(index, pattern, opts, stats ? *stats : local).run();
}

inline match_result search(const text_index& index, const vlg_pattern& pattern,
                           strategy kind = strategy::automatic, bool want_tuples = false,
                           std::size_t tuple_cap = std::numeric_limits<std::size_t>::max()) {
    search_options opts;
    opts.kind = kind;
    opts.want_tuples = want_tuples;
    opts.tuple_cap = tuple_cap;
    return search(index, pattern, opts);
}

} // namespace vlg
