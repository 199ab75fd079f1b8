// vlg: build suffix-array indexes, run variable-length-gap queries against
// them, and benchmark the matching strategies.
//
// Exit codes: 0 success / at least one match, 1 no match, 2 usage, input,
// parse or format error, 3 capacity exceeded, 4 --verify mismatch.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vlg/bench.hpp"
#include "vlg/corpus.hpp"
#include "vlg/error.hpp"
#include "vlg/index_io.hpp"
#include "vlg/match_engine.hpp"
#include "vlg/oracle.hpp"
#include "vlg/pattern.hpp"
#include "vlg/text_index.hpp"

namespace {

constexpr int exit_match = 0;
constexpr int exit_no_match = 1;
constexpr int exit_error = 2;
constexpr int exit_capacity = 3;
constexpr int exit_mismatch = 4;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct usage_failure : vlg::error {
    using vlg::error::error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw usage_failure("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw usage_failure("error reading " + path);
    return data;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct build_args {
    std::string text_path;
    std::string out_path;
    unsigned width = 5;
};

int cmd_build(const build_args& a) {
    auto t0 = clock_type::now();
    std::string text = read_file(a.text_path);
    const std::size_t n = text.size();
    vlg::text_index index(std::move(text));
    vlg::save_index(index, a.out_path, a.width);
    std::fprintf(stderr, "n=%zu elapsed=%.3fs\n", n, seconds_since(t0));
    return exit_match;
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

struct search_args {
    std::string index_path;
    std::string pattern;
    std::string pattern_file;
    std::string gap_mode = "start";
    std::string strategy = "auto";
    std::size_t block_size = 0;
    double sort_cost = vlg::default_sort_cost;
    bool tuples = false;
    std::size_t tuple_cap = 1000000;
    bool count = false;
    bool verify = false;
    bool trace = false;
};

vlg::gap_mode parse_gap_mode(const std::string& s) {
    if (s == "start")
        return vlg::gap_mode::start;
    if (s == "end")
        return vlg::gap_mode::end;
    throw usage_failure("unknown gap mode '" + s + "' (expected start or end)");
}

void print_result(const vlg::match_result& r, const search_args& a, std::ostream& out) {
    if (a.count) {
        out << r.endpoints.size() << '\n';
        return;
    }
    if (a.tuples) {
        for (const auto& t : r.tuples) {
            for (std::size_t i = 0; i < t.size(); ++i)
                out << (i ? "\t" : "") << t[i];
            out << '\n';
        }
        return;
    }
    for (auto p : r.endpoints)
        out << p << '\n';
}

void print_trace(const vlg::vlg_pattern& p, const vlg::search_options& opts, const vlg::search_stats& s,
                 double micros) {
    std::ostringstream line;
    line << "trace: pattern=" << vlg::render_pattern(p) << " strategy=" << vlg::to_string(opts.kind);
    if (s.short_circuited)
        line << " short-circuited";
    for (std::size_t j = 0; j < s.chosen.size(); ++j)
        line << " adj" << j << '=' << vlg::to_string(s.chosen[j]);
    line << " stage0=" << s.stage0 << " stage1=" << s.stage1 << " stage2=" << s.stage2 << " micros=" << micros;
    std::cerr << line.str() << '\n';
}

int cmd_search(const search_args& a) {
    const vlg::gap_mode mode = parse_gap_mode(a.gap_mode);
    auto kind = vlg::parse_strategy(a.strategy);
    if (!kind)
        throw usage_failure("unknown strategy '" + a.strategy + "'");

    std::vector<vlg::vlg_pattern> patterns;
    if (!a.pattern_file.empty()) {
        std::ifstream in(a.pattern_file);
        if (!in)
            throw usage_failure("cannot open " + a.pattern_file);
        patterns = vlg::read_pattern_file(in, mode);
    } else {
        patterns.push_back(vlg::parse_pattern(a.pattern, mode));
    }

    const vlg::text_index index = vlg::load_index(a.index_path);

    vlg::search_options opts;
    opts.kind = *kind;
    opts.want_tuples = a.tuples;
    opts.tuple_cap = a.tuple_cap;
    opts.block_size = a.block_size;
    opts.sort_cost = a.sort_cost;

    bool any_match = false, mismatch = false;
    const bool labelled = !a.pattern_file.empty();
    for (const auto& p : patterns) {
        vlg::search_stats stats;
        auto t0 = clock_type::now();
        vlg::match_result r = vlg::search(index, p, opts, &stats);
        const double micros = seconds_since(t0) * 1e6;
        if (a.trace)
            print_trace(p, opts, stats, micros);
        if (labelled)
            std::cout << "# " << vlg::render_pattern(p) << '\n';
        print_result(r, a, std::cout);
        if (r.truncated)
            std::cerr << "vlg: tuple output truncated at " << a.tuple_cap << '\n';
        any_match = any_match || !r.endpoints.empty();

        if (a.verify) {
            vlg::match_result expected = vlg::oracle_search(index.text(), p, a.tuples, a.tuple_cap);
            const bool same = expected.endpoints == r.endpoints &&
                              (!a.tuples || (expected.tuples == r.tuples && expected.truncated == r.truncated));
            std::cerr << "verify: " << (same ? "ok" : "MISMATCH") << ' ' << vlg::render_pattern(p) << " ("
                      << r.endpoints.size() << " endpoints, oracle " << expected.endpoints.size() << ")\n";
            mismatch = mismatch || !same;
        }
    }
    std::cout.flush();
    if (mismatch)
        return exit_mismatch;
    return any_match ? exit_match : exit_no_match;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct bench_args {
    std::string index_path;
    std::string config_path;
    std::vector<std::string> settings; // key=value, applied after the config file
    std::string out_path = "-";
    std::string summary_path;
    bool quiet = false;
    // Shorthand flags; each maps onto a config key and wins over the file.
    std::optional<std::string> dataset, ks, ms, gaps, patterns, strategies, block_sizes, seed, reps, pool, sort_cost;
    bool verify = false;
};

int cmd_bench(const bench_args& a) {
    vlg::bench::bench_config cfg;
    if (!a.config_path.empty()) {
        std::ifstream in(a.config_path);
        if (!in)
            throw usage_failure("cannot open " + a.config_path);
        vlg::bench::read_config(cfg, in);
    }
    for (const auto& kv : a.settings) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw vlg::invalid_argument("--set expects key=value, got '" + kv + "'");
        vlg::bench::apply_setting(cfg, std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
    }
    const std::pair<const char*, const std::optional<std::string>*> flags[] = {
        {"dataset", &a.dataset}, {"k", &a.ks},         {"m", &a.ms},           {"gaps", &a.gaps},
        {"patterns", &a.patterns}, {"strategies", &a.strategies}, {"block_sizes", &a.block_sizes},
        {"seed", &a.seed},       {"reps", &a.reps},     {"pool", &a.pool},      {"sort_cost", &a.sort_cost}};
    for (const auto& [key, value] : flags)
        if (*value)
            vlg::bench::apply_setting(cfg, key, **value);
    if (a.verify)
        cfg.verify = true;
    cfg.validate();

    const vlg::text_index index = vlg::load_index(a.index_path);

    std::size_t done = 0;
    auto progress = [&](const vlg::bench::bench_record& r) {
        if (!a.quiet && ++done % 100 == 0)
            std::fprintf(stderr, "bench: %zu records (k=%zu m=%zu %s)\n", done, r.k, r.m, r.strategy.c_str());
    };
    auto records = vlg::bench::run_bench(cfg, index, progress);

    if (a.out_path == "-") {
        vlg::bench::write_csv(records, std::cout);
    } else {
        std::ofstream out(a.out_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw usage_failure("cannot write " + a.out_path);
        vlg::bench::write_csv(records, out);
        if (!out)
            throw usage_failure("error writing " + a.out_path);
    }

    auto rows = vlg::bench::summarize(records);
    if (!a.summary_path.empty()) {
        std::ofstream out(a.summary_path, std::ios::trunc);
        if (!out)
            throw usage_failure("cannot write " + a.summary_path);
        vlg::bench::write_summary(rows, out);
    } else if (!a.quiet) {
        vlg::bench::write_summary(rows, std::cerr);
    }

    if (cfg.verify) {
        std::size_t failed = 0;
        for (const auto& r : records)
            failed += !r.verified;
        if (failed) {
            std::fprintf(stderr, "bench: %zu of %zu records disagree with the oracle\n", failed, records.size());
            return exit_mismatch;
        }
    }
    return exit_match;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

struct calibrate_args {
    std::string index_path;
    std::size_t length = std::size_t{16} << 20;
    std::uint64_t seed = 1;
    std::size_t patterns = 20;
    std::size_t reps = 3;
};

int cmd_calibrate(const calibrate_args& a) {
    vlg::text_index index = [&] {
        if (!a.index_path.empty())
            return vlg::load_index(a.index_path);
        vlg::corpus_options co;
        co.length = a.length;
        co.seed = a.seed;
        std::fprintf(stderr, "calibrate: indexing a %zu-byte synthetic corpus\n", a.length);
        return vlg::text_index(vlg::generate_corpus(co));
    }();
    vlg::bench::calibration_options opts;
    opts.seed = a.seed;
    opts.patterns = a.patterns;
    opts.repetitions = a.reps;
    auto c = vlg::bench::calibrate(index, opts);
    std::fprintf(stderr,
                 "calibrate: %zu queries; always filter %.2f ms, always text check %.2f ms, planned %.2f ms\n",
                 c.samples, c.filter_ms, c.check_ms, c.planned_ms);
    std::printf("sort_cost=%.4g\n", c.sort_cost);
    return exit_match;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-length-gap pattern matching over a suffix-array index"};
    app.require_subcommand(1);

    build_args ba;
    auto* build = app.add_subcommand("build", "Build an index file from a text file");
    build->add_option("text", ba.text_path, "Input text (any bytes)")->required();
    build->add_option("-o,--output", ba.out_path, "Index file to write")->required();
    build->add_option("--width", ba.width, "Bytes per stored position")->check(CLI::IsMember({5u, 8u}));

    search_args sa;
    auto* search = app.add_subcommand("search", "Find occurrences of a gapped pattern");
    search->add_option("index", sa.index_path, "Index file")->required();
    auto* pattern_opt = search->add_option("pattern", sa.pattern, "Pattern such as 'ab[2,5]ra'");
    auto* file_opt = search->add_option("--pattern-file", sa.pattern_file, "One pattern per line; # comments");
    pattern_opt->excludes(file_opt);
    search->add_option("--gap-mode", sa.gap_mode, "Gap bounds measure start-to-start or end-to-start")
        ->check(CLI::IsMember({"start", "end"}));
    search->add_option("--strategy", sa.strategy, "auto, baseline, radix, filter or textcheck")
        ->check(CLI::IsMember({"auto", "baseline", "radix", "filter", "textcheck"}));
    search->add_option("--block-size", sa.block_size, "Filter block size (power of two, 0 = automatic)");
    search->add_option("--sort-cost", sa.sort_cost, "Planner constant (see 'calibrate')")
        ->check(CLI::PositiveNumber);
    search->add_flag("--tuples", sa.tuples, "Print tab-separated k-tuples instead of endpoints");
    search->add_option("--tuple-cap", sa.tuple_cap, "Stop tuple output after this many");
    search->add_flag("--count", sa.count, "Print only the number of endpoints");
    search->add_flag("--verify", sa.verify, "Check the result against a brute-force scan");
    search->add_flag("--trace", sa.trace, "Report per-adjacency strategy and candidate counts on stderr");

    bench_args be;
    auto* bench = app.add_subcommand("bench", "Run the strategy benchmark and write CSV");
    bench->add_option("index", be.index_path, "Index file")->required();
    bench->add_option("--config", be.config_path, "key=value configuration file");
    bench->add_option("--set", be.settings, "Extra key=value setting (repeatable)");
    bench->add_option("--out", be.out_path, "CSV output path, - for stdout");
    bench->add_option("--summary", be.summary_path, "Write the summary table here instead of stderr");
    bench->add_flag("--quiet", be.quiet, "No progress or summary on stderr");
    bench->add_option("--dataset", be.dataset, "Dataset label for the CSV");
    bench->add_option("--k", be.ks, "Subpattern counts, comma separated");
    bench->add_option("--m", be.ms, "Subpattern lengths, comma separated");
    bench->add_option("--gaps", be.gaps, "Gap bands: S, M, L or name=lo:hi, comma separated");
    bench->add_option("--patterns", be.patterns, "Patterns per cell");
    bench->add_option("--strategies", be.strategies, "Strategies, comma separated");
    bench->add_option("--block-sizes", be.block_sizes, "Block sizes to sweep, comma separated");
    bench->add_option("--seed", be.seed, "Pattern generation seed");
    bench->add_option("--reps", be.reps, "Timed repetitions per query (median reported)");
    bench->add_option("--pool", be.pool, "Frequent-substring pool size");
    bench->add_option("--sort-cost", be.sort_cost, "Planner constant");
    bench->add_flag("--verify", be.verify, "Compare every query against the brute-force scan");

    calibrate_args ca;
    auto* calibrate = app.add_subcommand("calibrate", "Fit the planner constant on this host");
    calibrate->add_option("index", ca.index_path, "Index to sample queries from (default: synthetic corpus)");
    calibrate->add_option("--length", ca.length, "Synthetic corpus length when no index is given")
        ->transform(CLI::AsSizeValue(false));
    calibrate->add_option("--seed", ca.seed, "Corpus and pattern seed");
    calibrate->add_option("--patterns", ca.patterns, "Queries per gap band");
    calibrate->add_option("--reps", ca.reps, "Timed repetitions per query");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_error;
    }

    try {
        if (*build)
            return cmd_build(ba);
        if (*search) {
            if (sa.pattern_file.empty() && pattern_opt->count() == 0)
                throw usage_failure("search needs a pattern or --pattern-file");
            return cmd_search(sa);
        }
        if (*bench)
            return cmd_bench(be);
        if (*calibrate)
            return cmd_calibrate(ca);
    } catch (const vlg::capacity_error& e) {
        std::cerr << "vlg: " << e.what() << '\n';
        return exit_capacity;
    } catch (const std::bad_alloc&) {
        std::cerr << "vlg: out of memory\n";
        return exit_capacity;
    } catch (const std::exception& e) {
        std::cerr << "vlg: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
