#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vlg/error.hpp"
#include "vlg/random.hpp"
#include "vlg/text_index.hpp"

namespace vlg {

// Allowed start-to-start distance between consecutive subpattern occurrences.
struct gap_constraint {
    pos_t min_gap = 0;
    pos_t max_gap = 0;

    friend bool operator==(const gap_constraint&, const gap_constraint&) = default;
};

struct vlg_pattern {
    std::vector<std::string> subpatterns;
    std::vector<gap_constraint> gaps; // gaps[i] sits between subpatterns[i] and [i+1]

    std::size_t k() const noexcept { return subpatterns.size(); }

    void validate() const {
        if (subpatterns.empty())
            throw invalid_argument("pattern has no subpatterns");
        if (gaps.size() + 1 != subpatterns.size())
            throw invalid_argument("pattern needs exactly k-1 gap constraints");
        for (const auto& sub : subpatterns)
            if (sub.empty())
                throw invalid_argument("empty subpattern");
        for (const auto& g : gaps)
            if (g.min_gap > g.max_gap)
                throw invalid_argument("gap lower bound exceeds upper bound");
    }

    friend bool operator==(const vlg_pattern&, const vlg_pattern&) = default;
};

// How bracketed gap bounds in pattern text are measured.
enum class gap_mode {
    start, // start of p_i to start of p_{i+1}
    end,   // end of p_i to start of p_{i+1}
};

struct parse_options {
    gap_mode mode = gap_mode::start;
    bool hex_escapes = false; // accept \xNN inside subpatterns (pattern files)
};

namespace detail {

class pattern_parser {
public:
    pattern_parser(std::string_view s, parse_options opts) : s_(s), opts_(opts) {}

    vlg_pattern parse() {
        if (s_.empty())
            throw pattern_error("empty pattern", 0);
        vlg_pattern p;
        p.subpatterns.push_back(subpattern());
        while (pos_ < s_.size()) {
            std::size_t gap_at = pos_;
            gap_constraint g = gap();
            if (g.min_gap > g.max_gap)
                throw pattern_error("gap bound \xce\xb4 > \xce\x94 (" + std::to_string(g.min_gap) +
                                        " > " + std::to_string(g.max_gap) + ")",
                                    gap_at);
            if (opts_.mode == gap_mode::end) {
                pos_t m = p.subpatterns.back().size();
                if (g.max_gap > std::numeric_limits<pos_t>::max() - m)
                    throw pattern_error("gap bound overflows", gap_at);
                g.min_gap += m;
                g.max_gap += m;
            }
            p.gaps.push_back(g);
            p.subpatterns.push_back(subpattern());
        }
        return p;
    }

private:
    std::string subpattern() {
        std::string out;
        std::size_t begin = pos_;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '[')
                break;
            if (c == ']')
                throw pattern_error("unexpected ']'", pos_);
            if (c == '\\') {
                if (pos_ + 1 >= s_.size())
                    throw pattern_error("dangling escape", pos_);
                char e = s_[pos_ + 1];
                if (e == '[' || e == ']' || e == '\\') {
                    out.push_back(e);
                    pos_ += 2;
                    continue;
                }
                if (opts_.hex_escapes && e == 'x') {
                    int hi = hex_value(pos_ + 2), lo = hex_value(pos_ + 3);
                    if (hi < 0 || lo < 0)
                        throw pattern_error("malformed \\x escape", pos_);
                    out.push_back(static_cast<char>(hi * 16 + lo));
                    pos_ += 4;
                    continue;
                }
                throw pattern_error("unknown escape", pos_);
            }
            out.push_back(c);
            ++pos_;
        }
        if (out.empty())
            throw pattern_error("empty subpattern", begin);
        return out;
    }

    int hex_value(std::size_t at) const {
        if (at >= s_.size())
            return -1;
        char c = s_[at];
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    }

    gap_constraint gap() {
        expect('[');
        pos_t lo = number();
        skip_space();
        expect(',');
        pos_t hi = number();
        skip_space();
        expect(']');
        return {lo, hi};
    }

    void skip_space() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
            ++pos_;
    }

    void expect(char c) {
        if (pos_ >= s_.size())
            throw pattern_error(std::string("malformed gap: expected '") + c + "' before end of pattern",
                                pos_);
        if (s_[pos_] != c)
            throw pattern_error(std::string("malformed gap: expected '") + c + "'", pos_);
        ++pos_;
    }

    pos_t number() {
        skip_space();
        std::size_t begin = pos_;
        pos_t v = 0;
        while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
            pos_t digit = static_cast<pos_t>(s_[pos_] - '0');
            if (v > (std::numeric_limits<pos_t>::max() - digit) / 10)
                throw pattern_error("gap bound overflows", begin);
            v = v * 10 + digit;
            ++pos_;
        }
        if (pos_ == begin)
            throw pattern_error("malformed gap: expected a non-negative integer", pos_);
        return v;
    }

    std::string_view s_;
    parse_options opts_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline vlg_pattern parse_pattern(std::string_view s, parse_options opts = {}) {
    return detail::pattern_parser(s, opts).parse();
}

inline vlg_pattern parse_pattern(std::string_view s, gap_mode mode) {
    return parse_pattern(s, parse_options{mode, false});
}

// Inverse of parse_pattern in start mode.
inline std::string render_pattern(const vlg_pattern& p) {
    std::string out;
    for (std::size_t i = 0; i < p.subpatterns.size(); ++i) {
        if (i > 0) {
            const auto& g = p.gaps[i - 1];
            out += '[' + std::to_string(g.min_gap) + ',' + std::to_string(g.max_gap) + ']';
        }
        for (char c : p.subpatterns[i]) {
            if (c == '[' || c == ']' || c == '\\')
                out.push_back('\\');
            out.push_back(c);
        }
    }
    return out;
}

// One pattern per line; blank lines and lines starting with '#' are skipped.
// Subpatterns may carry \xNN byte escapes.
inline std::vector<vlg_pattern> read_pattern_file(std::istream& in, gap_mode mode = gap_mode::start) {
    std::vector<vlg_pattern> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        try {
            out.push_back(parse_pattern(line, parse_options{mode, true}));
        } catch (const pattern_error& e) {
            throw pattern_error("line " + std::to_string(lineno) + ": " + e.message(), e.offset());
        }
    }
    return out;
}

struct frequent_substring {
    std::string bytes;
    std::uint64_t count = 0;

    friend bool operator==(const frequent_substring&, const frequent_substring&) = default;
};

namespace detail {

// Packs up to 8 bytes big-endian so integer order equals unsigned lexicographic order.
inline std::uint64_t pack_window(const unsigned char* p, std::size_t m) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < m; ++i)
        key = (key << 8) | p[i];
    return key;
}

inline std::string unpack_window(std::uint64_t key, std::size_t m) {
    std::string out(m, '\0');
    for (std::size_t i = m; i-- > 0;) {
        out[i] = static_cast<char>(key & 0xFF);
        key >>= 8;
    }
    return out;
}

template <typename Key>
std::vector<std::pair<Key, std::uint64_t>> top_entries(std::vector<std::pair<Key, std::uint64_t>> all,
                                                       std::size_t count) {
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    };
    if (all.size() > count) {
        std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(), better);
        all.resize(count);
    }
    std::sort(all.begin(), all.end(), better);
    return all;
}

} // namespace detail

// The `count` most frequent length-m substrings, by descending frequency with
// ties broken by ascending (unsigned) lexicographic order.
inline std::vector<frequent_substring> top_frequent_substrings(std::string_view text, std::size_t m,
                                                               std::size_t count) {
    if (m == 0)
        throw invalid_argument("substring length must be positive");
    if (m > text.size())
        throw invalid_argument("substring length " + std::to_string(m) + " exceeds text length " +
                               std::to_string(text.size()));
    if (count == 0)
        throw invalid_argument("count must be positive");

    const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
    const std::size_t windows = text.size() - m + 1;
    std::vector<frequent_substring> out;

    if (m <= 3 && windows < (std::uint64_t{1} << 32)) {
        std::vector<std::uint32_t> counts(std::size_t{1} << (8 * m), 0);
        std::uint64_t mask = (std::uint64_t{1} << (8 * m)) - 1;
        std::uint64_t key = detail::pack_window(bytes, m - 1);
        for (std::size_t i = m - 1; i < text.size(); ++i) {
            key = ((key << 8) | bytes[i]) & mask;
            ++counts[key];
        }
        std::vector<std::pair<std::uint64_t, std::uint64_t>> all;
        for (std::uint64_t k = 0; k < counts.size(); ++k)
            if (counts[k] != 0)
                all.emplace_back(k, counts[k]);
        for (auto& [k, c] : detail::top_entries(std::move(all), count))
            out.push_back({detail::unpack_window(k, m), c});
    } else if (m <= 8) {
        std::unordered_map<std::uint64_t, std::uint64_t> counts;
        std::uint64_t mask = m == 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * m)) - 1;
        std::uint64_t key = detail::pack_window(bytes, m - 1);
        for (std::size_t i = m - 1; i < text.size(); ++i) {
            key = ((key << 8) | bytes[i]) & mask;
            ++counts[key];
        }
        std::vector<std::pair<std::uint64_t, std::uint64_t>> all(counts.begin(), counts.end());
        for (auto& [k, c] : detail::top_entries(std::move(all), count))
            out.push_back({detail::unpack_window(k, m), c});
    } else {
        std::unordered_map<std::string_view, std::uint64_t> counts;
        for (std::size_t i = 0; i < windows; ++i)
            ++counts[text.substr(i, m)];
        // string_view compares with char_traits<char>, which orders bytes as unsigned.
        std::vector<std::pair<std::string_view, std::uint64_t>> all(counts.begin(), counts.end());
        for (auto& [k, c] : detail::top_entries(std::move(all), count))
            out.push_back({std::string(k), c});
    }
    return out;
}

inline constexpr std::size_t default_pool_size = 200;

// Patterns of k subpatterns drawn uniformly with replacement from `pool`,
// every gap set to `gap`.
inline std::vector<vlg_pattern> generate_patterns(const std::vector<std::string>& pool, std::size_t k,
                                                  gap_constraint gap, std::size_t how_many,
                                                  std::uint64_t seed) {
    if (pool.empty())
        throw invalid_argument("subpattern pool is empty");
    if (k == 0)
        throw invalid_argument("k must be positive");
    xoshiro256ss rng(seed);
    std::vector<vlg_pattern> out;
    out.reserve(how_many);
    for (std::size_t p = 0; p < how_many; ++p) {
        vlg_pattern pat;
        for (std::size_t i = 0; i < k; ++i)
            pat.subpatterns.push_back(pool[rng.below(pool.size())]);
        pat.gaps.assign(k - 1, gap);
        out.push_back(std::move(pat));
    }
    return out;
}

inline std::vector<std::string> substring_pool(std::string_view text, std::size_t m,
                                               std::size_t pool_size = default_pool_size) {
    std::vector<std::string> pool;
    for (auto& f : top_frequent_substrings(text, m, pool_size))
        pool.push_back(std::move(f.bytes));
    return pool;
}

inline std::vector<vlg_pattern> generate_patterns(std::string_view text, std::size_t k, std::size_t m,
                                                  gap_constraint gap, std::size_t how_many,
                                                  std::uint64_t seed) {
    return generate_patterns(substring_pool(text, m), k, gap, how_many, seed);
}

} // namespace vlg
