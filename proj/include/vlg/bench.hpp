#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vlg/error.hpp"
#include "vlg/match_engine.hpp"
#include "vlg/oracle.hpp"
#include "vlg/pattern.hpp"
#include "vlg/random.hpp"
#include "vlg/text_index.hpp"

namespace vlg::bench {

struct gap_band {
    std::string name;
    gap_constraint gap;

    friend bool operator==(const gap_band&, const gap_band&) = default;
};

inline std::vector<gap_band> default_bands() {
    return {{"S", {100, 110}}, {"M", {1000, 1100}}, {"L", {10000, 11000}}};
}

struct bench_config {
    std::string dataset = "text";
    std::vector<std::size_t> ks = {2, 4, 8, 16, 32};
    std::vector<std::size_t> ms = {3, 5, 7};
    std::vector<gap_band> bands = default_bands();
    std::size_t patterns_per_cell = 20;
    std::vector<strategy> strategies = {strategy::automatic};
    std::vector<std::size_t> block_sizes; // empty: default rule
    std::uint64_t seed = 1;
    std::size_t repetitions = 3;
    bool verify = false;
    std::size_t pool_size = default_pool_size;
    double sort_cost = default_sort_cost;

    void validate() const {
        if (ks.empty() || ms.empty() || bands.empty() || strategies.empty())
            throw invalid_argument("bench lists must be non-empty");
        if (patterns_per_cell == 0 || repetitions == 0 || pool_size == 0)
            throw invalid_argument("patterns, repetitions and pool size must be positive");
        for (auto k : ks)
            if (k == 0)
                throw invalid_argument("k must be positive");
        for (auto m : ms)
            if (m == 0)
                throw invalid_argument("m must be positive");
        for (const auto& b : bands)
            if (b.gap.min_gap > b.gap.max_gap)
                throw invalid_argument("gap band " + b.name + " has lower bound above upper bound");
        for (auto b : block_sizes)
            if (b == 0 || (b & (b - 1)) != 0)
                throw invalid_argument("block sizes must be powers of two");
    }
};

inline constexpr std::size_t stage_count = 3;

struct bench_record {
    std::string dataset;
    std::string strategy;
    std::size_t k = 0;
    std::size_t m = 0;
    pos_t gap_lo = 0;
    pos_t gap_hi = 0;
    std::size_t block_size = 0; // 0 when the strategy uses no filter
    std::size_t pattern_id = 0;
    double micros = 0;
    std::uint64_t endpoints = 0;
    std::vector<std::uint64_t> stages; // cand_stage0..cand_stage2
    bool verified = false;

    friend bool operator==(const bench_record&, const bench_record&) = default;
};

// ---------------------------------------------------------------------------
// Configuration: flat key=value, shared by config files and CLI flags
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto at = s.find(sep, start);
        out.push_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
        if (at == std::string_view::npos)
            break;
        start = at + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view s) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw invalid_argument("bad value '" + std::string(s) + "' for " + std::string(key));
    return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view s) {
    std::vector<T> out;
    for (auto& item : split(s, ','))
        out.push_back(parse_number<T>(key, item));
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on")
        return true;
    if (s == "0" || s == "false" || s == "no" || s == "off")
        return false;
    throw invalid_argument("bad boolean '" + std::string(s) + "' for " + std::string(key));
}

// "S", "M", "L" name the default bands; "lo:hi" or "name=lo:hi" define new ones.
inline std::vector<gap_band> parse_bands(std::string_view s) {
    std::vector<gap_band> out;
    for (auto& item : split(s, ',')) {
        bool found = false;
        for (const auto& b : default_bands())
            if (b.name == item) {
                out.push_back(b);
                found = true;
            }
        if (found)
            continue;
        std::string name;
        std::string range = item;
        if (auto eq = item.find('='); eq != std::string::npos) {
            name = trim(item.substr(0, eq));
            range = trim(item.substr(eq + 1));
        }
        auto colon = range.find(':');
        if (colon == std::string::npos)
            throw invalid_argument("bad gap band '" + item + "', expected lo:hi");
        gap_constraint g{parse_number<pos_t>("gaps", trim(range.substr(0, colon))),
                         parse_number<pos_t>("gaps", trim(range.substr(colon + 1)))};
        if (name.empty())
            name = std::to_string(g.min_gap) + ":" + std::to_string(g.max_gap);
        out.push_back({name, g});
    }
    return out;
}

} // namespace detail

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"dataset", "k",    "m",      "gaps",  "patterns", "strategies",
                                                  "block_sizes", "seed", "reps", "verify", "pool", "sort_cost"};
    return keys;
}

inline void apply_setting(bench_config& cfg, std::string_view key, std::string_view value) {
    const std::string v = detail::trim(value);
    if (key == "dataset") {
        cfg.dataset = v;
    } else if (key == "k") {
        cfg.ks = detail::parse_list<std::size_t>(key, v);
    } else if (key == "m") {
        cfg.ms = detail::parse_list<std::size_t>(key, v);
    } else if (key == "gaps") {
        cfg.bands = detail::parse_bands(v);
    } else if (key == "patterns") {
        cfg.patterns_per_cell = detail::parse_number<std::size_t>(key, v);
    } else if (key == "strategies") {
        std::vector<strategy> parsed;
        for (auto& name : detail::split(v, ',')) {
            auto s = parse_strategy(name);
            if (!s)
                throw invalid_argument("unknown strategy '" + name + "'");
            parsed.push_back(*s);
        }
        cfg.strategies = std::move(parsed);
    } else if (key == "block_sizes") {
        cfg.block_sizes = v.empty() ? std::vector<std::size_t>{} : detail::parse_list<std::size_t>(key, v);
    } else if (key == "seed") {
        cfg.seed = detail::parse_number<std::uint64_t>(key, v);
    } else if (key == "reps") {
        cfg.repetitions = detail::parse_number<std::size_t>(key, v);
    } else if (key == "verify") {
        cfg.verify = detail::parse_bool(key, v);
    } else if (key == "pool") {
        cfg.pool_size = detail::parse_number<std::size_t>(key, v);
    } else if (key == "sort_cost") {
        cfg.sort_cost = detail::parse_number<double>(key, v);
    } else {
        throw invalid_argument("unknown config key '" + std::string(key) + "'");
    }
}

// Applies a key=value file ('#' comments, blank lines ignored) on top of cfg.
inline void read_config(bench_config& cfg, std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        try {
            apply_setting(cfg, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
        } catch (const invalid_argument& e) {
            throw invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

// Seed for one (k, m, band) cell so every strategy sees the same patterns.
inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t k, std::size_t m, std::size_t band) {
    std::uint64_t state = seed;
    std::uint64_t h = xoshiro256ss::splitmix64(state);
    for (std::uint64_t part : {std::uint64_t{k}, std::uint64_t{m}, std::uint64_t{band}}) {
        state = h ^ part;
        h = xoshiro256ss::splitmix64(state);
    }
    return h;
}

struct pattern_cell {
    std::size_t k;
    std::size_t m;
    gap_band band;
    std::vector<vlg_pattern> patterns;
};

// The deterministic pattern sets for every (k, m, band) cell of the config.
inline std::vector<pattern_cell> generate_cells(const bench_config& cfg, std::string_view text) {
    std::vector<pattern_cell> cells;
    std::map<std::size_t, std::vector<std::string>> pools;
    for (std::size_t m : cfg.ms) {
        if (m > text.size())
            throw invalid_argument("text shorter than subpattern length " + std::to_string(m));
        pools[m] = substring_pool(text, m, cfg.pool_size);
    }
    for (std::size_t k : cfg.ks)
        for (std::size_t m : cfg.ms)
            for (std::size_t b = 0; b < cfg.bands.size(); ++b)
                cells.push_back({k, m, cfg.bands[b],
                                 generate_patterns(pools[m], k, cfg.bands[b].gap, cfg.patterns_per_cell,
                                                   cell_seed(cfg.seed, k, m, b))});
    return cells;
}

using progress_fn = std::function<void(const bench_record&)>;

inline double median(std::vector<double> v) {
    if (v.empty())
        return 0;
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
}

inline std::vector<bench_record> run_bench(const bench_config& cfg, const text_index& index,
                                           const progress_fn& progress = {}) {
    cfg.validate();
    const std::size_t n = index.size();
    if (n == 0)
        throw invalid_argument("index is empty");
    for (const auto& band : cfg.bands)
        for (std::size_t m : cfg.ms)
            if (band.gap.max_gap + m > n)
                throw invalid_argument("text of " + std::to_string(n) + " bytes is shorter than gap " + band.name +
                                       " upper bound plus m=" + std::to_string(m));

    auto cells = generate_cells(cfg, index.text());
    std::vector<bench_record> records;
    using clock = std::chrono::steady_clock;

    for (const auto& cell : cells) {
        for (strategy kind : cfg.strategies) {
            const bool filtered = kind == strategy::filter_sort || kind == strategy::automatic;
            std::vector<std::size_t> sizes = filtered && !cfg.block_sizes.empty() ? cfg.block_sizes
                                                                                   : std::vector<std::size_t>{0};
            for (std::size_t block : sizes) {
                search_options opts;
                opts.kind = kind;
                opts.block_size = block;
                opts.sort_cost = cfg.sort_cost;
                const std::size_t effective_block =
                    !filtered ? 0
                    : block   ? block
                              : default_block_size(n, cell.band.gap.min_gap, cell.band.gap.max_gap,
                                                   opts.filter_budget_bits);

                for (std::size_t pid = 0; pid < cell.patterns.size(); ++pid) {
                    const auto& pattern = cell.patterns[pid];
                    search_stats stats;
                    match_result result = search(index, pattern, opts); // warm-up, untimed
                    std::vector<double> times;
                    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
                        stats = {};
                        auto t0 = clock::now();
                        result = search(index, pattern, opts, &stats);
                        auto t1 = clock::now();
                        times.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
                    }

                    bench_record r;
                    r.dataset = cfg.dataset;
                    r.strategy = std::string(to_string(kind));
                    r.k = cell.k;
                    r.m = cell.m;
                    r.gap_lo = cell.band.gap.min_gap;
                    r.gap_hi = cell.band.gap.max_gap;
                    r.block_size = effective_block;
                    r.pattern_id = pid;
                    r.micros = median(times);
                    r.endpoints = result.endpoints.size();
                    r.stages = {stats.stage0, stats.stage1, stats.stage2};
                    r.verified = cfg.verify && oracle_search(index.text(), pattern).endpoints == result.endpoints;
                    if (progress)
                        progress(r);
                    records.push_back(std::move(r));
                }
            }
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Planner calibration
// ---------------------------------------------------------------------------

struct calibration {
    double sort_cost = default_sort_cost; // threshold for plan_pair that minimizes total sampled time
    double planned_ms = 0;                // sampled total when planning with sort_cost
    double filter_ms = 0;                 // sampled total when always filtering
    double check_ms = 0;                  // sampled total when always text checking
    std::size_t samples = 0;
};

struct calibration_options {
    std::vector<gap_band> bands = {{"S", {100, 110}}, {"M", {1000, 1100}}};
    std::size_t m = 3;
    std::size_t patterns = 20;
    std::size_t repetitions = 3;
    std::uint64_t seed = 1;
};

// Times the filter and text-check strategies on two-subpattern queries drawn
// from the index. plan_pair picks text checking exactly when
// min(a, b) * (width + m) / (a + b) < sort_cost, so the constant is fitted as
// the threshold on that ratio that minimizes the summed time of the choices.
inline calibration calibrate(const text_index& index, const calibration_options& opts = {}) {
    if (opts.patterns == 0 || opts.repetitions == 0 || opts.m == 0)
        throw invalid_argument("calibration needs positive pattern, repetition and length counts");
    using clock = std::chrono::steady_clock;
    auto timed = [&](const vlg_pattern& p, strategy kind) {
        search_options so;
        so.kind = kind;
        search(index, p, so); // warm-up
        std::vector<double> times;
        for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
            auto t0 = clock::now();
            search(index, p, so);
            times.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
        }
        return median(times);
    };

    struct sample {
        double ratio, filter_ms, check_ms;
    };
    std::vector<sample> samples;
    for (std::size_t bi = 0; bi < opts.bands.size(); ++bi) {
        const gap_constraint gap = opts.bands[bi].gap;
        if (gap.max_gap + opts.m > index.size())
            continue;
        auto patterns = generate_patterns(index.text(), 2, opts.m, gap, opts.patterns,
                                          cell_seed(opts.seed, 2, opts.m, bi));
        for (const auto& p : patterns) {
            const auto a = static_cast<double>(index.find(p.subpatterns[0]).size());
            const auto b = static_cast<double>(index.find(p.subpatterns[1]).size());
            const double window = static_cast<double>(gap.max_gap - gap.min_gap) + static_cast<double>(opts.m);
            samples.push_back({std::min(a, b) * window / (a + b), timed(p, strategy::filter_sort),
                               timed(p, strategy::text_check)});
        }
    }
    if (samples.empty())
        throw invalid_argument("text of " + std::to_string(index.size()) + " bytes is too short to calibrate");
    std::sort(samples.begin(), samples.end(), [](const sample& x, const sample& y) { return x.ratio < y.ratio; });

    calibration c;
    c.samples = samples.size();
    for (const auto& s : samples) {
        c.filter_ms += s.filter_ms;
        c.check_ms += s.check_ms;
    }
    // Threshold after the first i samples (by ratio): those are text checked, the rest filtered.
    double best = c.filter_ms, running = c.filter_ms;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        running += samples[i].check_ms - samples[i].filter_ms;
        if (running < best) {
            best = running;
            best_i = i + 1;
        }
    }
    c.planned_ms = best;
    if (best_i == 0)
        c.sort_cost = samples.front().ratio / 2;
    else if (best_i == samples.size())
        c.sort_cost = samples.back().ratio * 2;
    else // geometric midpoint between the last checked and first filtered ratio
        c.sort_cost = std::sqrt(samples[best_i - 1].ratio * samples[best_i].ratio);
    return c;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string csv_header() {
    std::string h = "dataset,strategy,k,m,gap_lo,gap_hi,block_size,pattern_id,micros,endpoints";
    for (std::size_t s = 0; s < stage_count; ++s)
        h += ",cand_stage" + std::to_string(s);
    return h + ",verified";
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Reads one RFC 4180 record; returns false at end of input.
inline bool read_csv_row(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof())
        return false;
    std::string field;
    bool quoted = false;
    bool any = false;
    int c;
    while ((c = in.get()) != std::char_traits<char>::eof()) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += static_cast<char>(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && in.peek() == '\n') {
            in.get();
            break;
        } else if (c == '\n') {
            break;
        } else {
            field += static_cast<char>(c);
        }
    }
    if (quoted)
        throw invalid_argument("unterminated quoted CSV field");
    if (any)
        fields.push_back(std::move(field));
    return any;
}

} // namespace detail

inline void write_csv(const std::vector<bench_record>& records, std::ostream& out) {
    out << csv_header() << "\r\n";
    for (const auto& r : records) {
        out << detail::csv_field(r.dataset) << ',' << detail::csv_field(r.strategy) << ',' << r.k << ',' << r.m
            << ',' << r.gap_lo << ',' << r.gap_hi << ',' << r.block_size << ',' << r.pattern_id << ','
            << detail::format_double(r.micros) << ',' << r.endpoints;
        for (std::size_t s = 0; s < stage_count; ++s)
            out << ',' << (s < r.stages.size() ? r.stages[s] : 0);
        out << ',' << (r.verified ? 1 : 0) << "\r\n";
    }
}

inline std::vector<bench_record> read_csv(std::istream& in) {
    std::vector<std::string> f;
    if (!detail::read_csv_row(in, f))
        throw invalid_argument("CSV is empty");
    std::string header;
    for (std::size_t i = 0; i < f.size(); ++i)
        header += (i ? "," : "") + f[i];
    if (header != csv_header())
        throw invalid_argument("unexpected CSV header");

    const std::size_t width = 10 + stage_count + 1;
    std::vector<bench_record> out;
    while (detail::read_csv_row(in, f)) {
        if (f.size() != width)
            throw invalid_argument("CSV row has " + std::to_string(f.size()) + " fields, expected " +
                                   std::to_string(width));
        bench_record r;
        r.dataset = f[0];
        r.strategy = f[1];
        r.k = detail::parse_number<std::size_t>("k", f[2]);
        r.m = detail::parse_number<std::size_t>("m", f[3]);
        r.gap_lo = detail::parse_number<pos_t>("gap_lo", f[4]);
        r.gap_hi = detail::parse_number<pos_t>("gap_hi", f[5]);
        r.block_size = detail::parse_number<std::size_t>("block_size", f[6]);
        r.pattern_id = detail::parse_number<std::size_t>("pattern_id", f[7]);
        r.micros = detail::parse_number<double>("micros", f[8]);
        r.endpoints = detail::parse_number<std::uint64_t>("endpoints", f[9]);
        for (std::size_t s = 0; s < stage_count; ++s)
            r.stages.push_back(detail::parse_number<std::uint64_t>("cand_stage", f[10 + s]));
        r.verified = detail::parse_bool("verified", f[10 + stage_count]);
        out.push_back(std::move(r));
    }
    return out;
}

// One row per (dataset, strategy, k, m, gap band, block size).
struct summary_row {
    std::string dataset;
    std::string strategy;
    std::size_t k = 0;
    std::size_t m = 0;
    pos_t gap_lo = 0;
    pos_t gap_hi = 0;
    std::size_t block_size = 0;
    std::size_t patterns = 0;
    double total_micros = 0;
    double median_micros = 0;
    std::uint64_t endpoints = 0;
    bool all_verified = true;
};

inline std::vector<summary_row> summarize(const std::vector<bench_record>& records) {
    using key_t = std::tuple<std::string, std::string, std::size_t, std::size_t, pos_t, pos_t, std::size_t>;
    std::map<key_t, std::vector<const bench_record*>> groups;
    std::vector<key_t> order;
    for (const auto& r : records) {
        key_t key{r.dataset, r.strategy, r.k, r.m, r.gap_lo, r.gap_hi, r.block_size};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
            order.push_back(key);
        it->second.push_back(&r);
    }
    std::vector<summary_row> out;
    for (const auto& key : order) {
        const auto& members = groups[key];
        summary_row row;
        std::tie(row.dataset, row.strategy, row.k, row.m, row.gap_lo, row.gap_hi, row.block_size) = key;
        std::vector<double> times;
        for (const auto* r : members) {
            row.total_micros += r->micros;
            row.endpoints += r->endpoints;
            row.all_verified = row.all_verified && r->verified;
            times.push_back(r->micros);
        }
        row.patterns = members.size();
        row.median_micros = median(times);
        out.push_back(std::move(row));
    }
    return out;
}

// Total milliseconds per cell, with the per-pattern median in parentheses,
// laid out as a grid: one line per (k, strategy, m, block
// size), one column per gap band.
inline void write_summary(const std::vector<summary_row>& rows, std::ostream& out) {
    std::vector<std::pair<pos_t, pos_t>> bands;
    for (const auto& r : rows)
        if (std::find(bands.begin(), bands.end(), std::pair{r.gap_lo, r.gap_hi}) == bands.end())
            bands.emplace_back(r.gap_lo, r.gap_hi);

    using line_key = std::tuple<std::string, std::size_t, std::string, std::size_t, std::size_t>;
    std::map<line_key, std::map<std::pair<pos_t, pos_t>, const summary_row*>> lines;
    for (const auto& r : rows)
        lines[{r.dataset, r.k, r.strategy, r.m, r.block_size}][{r.gap_lo, r.gap_hi}] = &r;

    out << "dataset\tk\tstrategy\tm\tblock";
    for (auto [lo, hi] : bands)
        out << "\t<" << lo << "," << hi << "> ms (median)";
    out << '\n';
    for (const auto& [key, cells] : lines) {
        const auto& [dataset, k, strat, m, block] = key;
        out << dataset << '\t' << k << '\t' << strat << '\t' << m << '\t' << block;
        for (auto band : bands) {
            auto it = cells.find(band);
            out << '\t';
            if (it == cells.end()) {
                out << '-';
            } else {
                std::ostringstream cell;
                cell.setf(std::ios::fixed);
                cell.precision(3);
                cell << it->second->total_micros / 1000.0 << " (" << it->second->median_micros / 1000.0 << ')';
                out << cell.str();
            }
        }
        out << '\n';
    }
}

} // namespace vlg::bench
