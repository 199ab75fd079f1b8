#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

// Induced-sorting suffix array construction (SA-IS) with a virtual end
// sentinel: the empty suffix is smaller than every other suffix, so a suffix
// that is a proper prefix of another sorts first. Nothing is appended to the
// input.
namespace vlg::detail {

template <typename Idx>
class sais_builder {
public:
    static constexpr Idx empty = std::numeric_limits<Idx>::max();

    template <typename Char>
    static void run(const Char* s, Idx* sa, Idx n, Idx alphabet) {
        if (n == 0)
            return;
        if (n == 1) {
            sa[0] = 0;
            return;
        }

        std::vector<bool> stype(n, false);
        for (Idx i = n - 1; i-- > 0;)
            stype[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && stype[i + 1]);
        auto is_lms = [&](Idx i) { return i > 0 && i < n && stype[i] && !stype[i - 1]; };

        std::vector<Idx> counts(alphabet, 0);
        for (Idx i = 0; i < n; ++i)
            ++counts[static_cast<Idx>(s[i])];
        std::vector<Idx> bucket(alphabet);

        auto bucket_ends = [&] {
            Idx sum = 0;
            for (Idx c = 0; c < alphabet; ++c) {
                sum += counts[c];
                bucket[c] = sum;
            }
        };
        auto bucket_starts = [&] {
            Idx sum = 0;
            for (Idx c = 0; c < alphabet; ++c) {
                bucket[c] = sum;
                sum += counts[c];
            }
        };
        auto induce = [&] {
            bucket_starts();
            // The sentinel's predecessor n-1 is always L-type and first in its bucket.
            sa[bucket[static_cast<Idx>(s[n - 1])]++] = n - 1;
            for (Idx j = 0; j < n; ++j) {
                Idx p = sa[j];
                if (p != empty && p > 0 && !stype[p - 1])
                    sa[bucket[static_cast<Idx>(s[p - 1])]++] = p - 1;
            }
            bucket_ends();
            for (Idx j = n; j-- > 0;) {
                Idx p = sa[j];
                if (p != empty && p > 0 && stype[p - 1])
                    sa[--bucket[static_cast<Idx>(s[p - 1])]] = p - 1;
            }
        };

        // Stage 1: sort LMS substrings.
        std::fill(sa, sa + n, empty);
        bucket_ends();
        for (Idx i = 1; i < n; ++i)
            if (is_lms(i))
                sa[--bucket[static_cast<Idx>(s[i])]] = i;
        induce();

        Idx lms_count = 0;
        for (Idx j = 0; j < n; ++j)
            if (is_lms(sa[j]))
                sa[lms_count++] = sa[j];
        std::fill(sa + lms_count, sa + n, empty);

        // Name LMS substrings; names go to sa[lms_count + p/2] (LMS positions are >= 2 apart).
        Idx names = 0;
        Idx prev = empty;
        for (Idx j = 0; j < lms_count; ++j) {
            Idx p = sa[j];
            bool differs = prev == empty;
            for (Idx d = 0; !differs; ++d) {
                if (p + d == n || prev + d == n) {
                    differs = true;
                    break;
                }
                if (s[p + d] != s[prev + d] || stype[p + d] != stype[prev + d]) {
                    differs = true;
                    break;
                }
                if (d > 0 && (is_lms(p + d) || is_lms(prev + d)))
                    break;
            }
            if (differs)
                ++names;
            prev = p;
            sa[lms_count + p / 2] = names - 1;
        }

        // Stage 2: order LMS suffixes, recursing when names are not unique.
        std::vector<Idx> reduced;
        reduced.reserve(lms_count);
        for (Idx j = lms_count; j < n; ++j)
            if (sa[j] != empty)
                reduced.push_back(sa[j]);

        std::vector<Idx> reduced_sa(lms_count);
        if (names < lms_count) {
            run(reduced.data(), reduced_sa.data(), lms_count, names);
        } else {
            for (Idx i = 0; i < lms_count; ++i)
                reduced_sa[reduced[i]] = i;
        }

        // Map reduced ranks back to text positions.
        {
            Idx j = 0;
            for (Idx i = 1; i < n; ++i)
                if (is_lms(i))
                    reduced[j++] = i;
        }
        for (Idx i = 0; i < lms_count; ++i)
            reduced_sa[i] = reduced[reduced_sa[i]];
        reduced.clear();
        reduced.shrink_to_fit();

        // Stage 3: induce the full order from the sorted LMS suffixes.
        std::fill(sa, sa + n, empty);
        bucket_ends();
        for (Idx i = lms_count; i-- > 0;) {
            Idx p = reduced_sa[i];
            sa[--bucket[static_cast<Idx>(s[p])]] = p;
        }
        reduced_sa.clear();
        reduced_sa.shrink_to_fit();
        induce();
    }
};

} // namespace vlg::detail
