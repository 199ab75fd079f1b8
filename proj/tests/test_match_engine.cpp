#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "test_support.hpp"
#include "vlg/match_engine.hpp"
#include "vlg/oracle.hpp"

using namespace vlg;
using vlg::testing::brute_window;
using vlg::testing::naive_find;

namespace {

const std::vector<strategy> all_strategies = {strategy::baseline_sort, strategy::radix_sort, strategy::filter_sort,
                                              strategy::text_check, strategy::automatic};

std::vector<pos_t> sorted_random(xoshiro256ss& rng, std::size_t n, std::size_t count) {
    std::vector<pos_t> v;
    for (std::size_t i = 0; i < count; ++i)
        v.push_back(rng.below(n));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

TEST_CASE("radix sort", "[match_engine]") {
    std::vector<pos_t> a{3, 1, 2};
    radix_sort(a);
    CHECK(a == std::vector<pos_t>{1, 2, 3});
    std::vector<pos_t> empty;
    radix_sort(empty);
    CHECK(empty.empty());

    xoshiro256ss rng(2);
    std::vector<pos_t> big(100000);
    for (auto& x : big)
        x = rng() >> 24; // 40-bit values
    auto expected = big;
    std::sort(expected.begin(), expected.end());
    radix_sort(big);
    CHECK(big == expected);

    std::vector<std::uint32_t> same(1000, 0x01020304u);
    same[500] = 0x01020305u;
    auto want = same;
    std::sort(want.begin(), want.end());
    radix_sort(same);
    CHECK(same == want);
}

TEST_CASE("radix sort is stable and a permutation", "[match_engine][property]") {
    xoshiro256ss rng(4);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<std::uint64_t> v(rng.below(3000));
        unsigned bits = 1 + static_cast<unsigned>(rng.below(64));
        for (auto& x : v)
            x = bits == 64 ? rng() : rng() & ((std::uint64_t{1} << bits) - 1);
        auto expected = v;
        std::sort(expected.begin(), expected.end());
        radix_sort(v);
        REQUIRE(v == expected);
    }
}

TEST_CASE("intersect_gapped examples", "[match_engine]") {
    std::vector<pos_t> a{0, 7}, b{2, 9};
    CHECK(intersect_gapped(a, b, 2, 2) == std::vector<pos_t>{2, 9});
    CHECK(intersect_gapped(a, b, 3, 4).empty());
    CHECK(intersect_gapped(std::vector<pos_t>{}, b, 0, 100).empty());
    // one B licensed by several A windows is reported once
    CHECK(intersect_gapped(std::vector<pos_t>{0, 1, 2}, std::vector<pos_t>{3}, 0, 5) == std::vector<pos_t>{3});
}

TEST_CASE("intersect_gapped equals brute force", "[match_engine][property]") {
    xoshiro256ss rng(8);
    for (int rep = 0; rep < 500; ++rep) {
        std::size_t n = 1 + rng.below(3000);
        auto a = sorted_random(rng, n, rng.below(60));
        auto b = sorted_random(rng, n, rng.below(60));
        pos_t lo = rng.below(n), hi = lo + rng.below(n / 2 + 1);
        REQUIRE(intersect_gapped(a, b, lo, hi) == brute_window(a, b, lo, hi));
        std::vector<pos_t> pred;
        for (auto i : a)
            for (auto j : b)
                if (i + lo <= j && j <= i + hi) {
                    pred.push_back(i);
                    break;
                }
        REQUIRE(having_successor(a, b, lo, hi) == pred);
    }
}

TEST_CASE("kmp search", "[match_engine]") {
    CHECK(kmp_search("banana", "ana") == std::vector<std::size_t>{1, 3});
    CHECK(kmp_search("aaaa", "aa") == std::vector<std::size_t>{0, 1, 2});
    CHECK(kmp_search("abc", "x").empty());
    CHECK(kmp_search("", "x").empty());
    CHECK_THROWS_AS(kmp_search("abc", ""), invalid_argument);

    xoshiro256ss rng(12);
    for (int rep = 0; rep < 300; ++rep) {
        auto hay = vlg::testing::random_text(rng, rng.below(200), 2 + static_cast<unsigned>(rng.below(3)));
        auto needle = vlg::testing::random_text(rng, 1 + rng.below(5), 2);
        auto naive = naive_find(hay, needle);
        auto got = kmp_search(hay, needle);
        REQUIRE(std::vector<pos_t>(got.begin(), got.end()) == naive);
    }
}

TEST_CASE("text checking examples", "[match_engine]") {
    const std::string text = "abracadabra";
    std::vector<pos_t> ab{0, 7}, ra{2, 9};
    CHECK(text_check_forward(ab, text, "ra", 2, 2) == std::vector<pos_t>{2, 9});
    CHECK(text_check_forward(std::vector<pos_t>{}, text, "ra", 2, 2).empty());
    CHECK(text_check_forward(std::vector<pos_t>{9}, text, "ra", 0, 50) == std::vector<pos_t>{9});

    CHECK(text_check_backward(ra, text, "ab", 2, 2) == std::vector<pos_t>{2, 9});
    CHECK(text_check_backward(ra, text, "ab", 3, 4).empty());
    CHECK(text_check_backward(std::vector<pos_t>{}, text, "ab", 2, 2).empty());
}

TEST_CASE("text checking agrees with merging all occurrences", "[match_engine][property]") {
    xoshiro256ss rng(21);
    for (int rep = 0; rep < 400; ++rep) {
        unsigned alphabet = std::vector<unsigned>{2, 4, 20}[rng.below(3)];
        std::size_t n = 1 + rng.below(1500);
        auto text = vlg::testing::random_text(rng, n, alphabet);
        auto first = vlg::testing::random_text(rng, 1 + rng.below(3), alphabet);
        auto second = vlg::testing::random_text(rng, 1 + rng.below(3), alphabet);
        pos_t lo = rng.below(n), hi = lo + rng.below(n / 2 + 1);
        auto a = naive_find(text, first);
        auto b = naive_find(text, second);
        REQUIRE(text_check_forward(a, text, second, lo, hi) == intersect_gapped(a, b, lo, hi));
        REQUIRE(text_check_backward(b, text, first, lo, hi) == intersect_gapped(a, b, lo, hi));
    }
}

TEST_CASE("filter_pair examples", "[match_engine]") {
    std::vector<pos_t> a{0}, b{6, 9};
    auto r = filter_pair(a, b, filter_direction::forward, 2, 5, 4, 16);
    CHECK(r.small == std::vector<pos_t>{0});
    CHECK(r.large == std::vector<pos_t>{6});
    CHECK_FALSE(r.second_round);

    auto none = filter_pair(std::vector<pos_t>{}, b, filter_direction::forward, 2, 5, 4, 16);
    CHECK(none.large.empty());

    auto exact = filter_pair(a, b, filter_direction::forward, 2, 5, 1, 16);
    CHECK(exact.large.empty());
    CHECK(exact.second_round);
    CHECK(exact.small.empty());
}

TEST_CASE("filter_pair second round prunes the small side soundly", "[match_engine][property]") {
    xoshiro256ss rng(31);
    for (int rep = 0; rep < 400; ++rep) {
        std::size_t n = 10 + rng.below(5000);
        auto small = sorted_random(rng, n, rng.below(50));
        auto large = sorted_random(rng, n, rng.below(200));
        pos_t lo = rng.below(n / 4 + 1), hi = lo + rng.below(n / 8 + 1);
        std::size_t b = std::size_t{1} << rng.below(8);

        auto fwd = filter_pair(small, large, filter_direction::forward, lo, hi, b, n);
        auto exact_b = brute_window(small, large, lo, hi);
        for (auto j : exact_b)
            REQUIRE(std::binary_search(fwd.large.begin(), fwd.large.end(), j));
        for (auto i : small) {
            bool partner = false;
            for (auto j : large)
                partner |= i + lo <= j && j <= i + hi;
            if (partner)
                REQUIRE(std::binary_search(fwd.small.begin(), fwd.small.end(), i));
        }
        REQUIRE(fwd.second_round == (2 * fwd.large.size() < small.size()));

        // backward: small side follows the large side
        auto bwd = filter_pair(small, large, filter_direction::backward, lo, hi, b, n);
        for (auto i : large) {
            bool partner = false;
            for (auto j : small)
                partner |= i + lo <= j && j <= i + hi;
            if (partner)
                REQUIRE(std::binary_search(bwd.large.begin(), bwd.large.end(), i));
        }
        for (auto j : brute_window(large, small, lo, hi))
            REQUIRE(std::binary_search(bwd.small.begin(), bwd.small.end(), j));
    }
}

TEST_CASE("plan_pair cost model", "[match_engine]") {
    CHECK(plan_pair(10, 1000000, 3, 100, 110) == strategy::text_check);
    CHECK(plan_pair(1000000, 1000000, 3, 0, 10000) == strategy::filter_sort);
    CHECK(plan_pair(0, 1000000, 3, 0, 10000) == strategy::text_check);
    CHECK(plan_pair(1000, 1000, 3, 0, 4, 4.0) == strategy::text_check);
    CHECK(plan_pair(1000, 1000, 3, 0, 4, 0.5) == strategy::filter_sort);
}

TEST_CASE("search examples", "[match_engine]") {
    text_index abra(std::string("abracadabra"));
    auto p = parse_pattern("ab[2,2]ra");
    for (auto s : all_strategies) {
        INFO(to_string(s));
        auto r = search(abra, p, s, true);
        CHECK(r.endpoints == std::vector<pos_t>{2, 9});
        CHECK(r.tuples == std::vector<std::vector<pos_t>>{{0, 2}, {7, 9}});
        CHECK_FALSE(r.truncated);
        CHECK(search(abra, parse_pattern("ab[3,4]ra"), s).endpoints.empty());
    }

    text_index banana(std::string("banana"));
    CHECK(search(banana, parse_pattern("ana")).endpoints == std::vector<pos_t>{1, 3});

    search_stats stats;
    auto motif = parse_pattern("MT[115,136]MTNTAYGG[121,151]GTNGAYGAY");
    xoshiro256ss rng(1);
    text_index protein(vlg::testing::random_text(rng, 5000, 20) + "MT");
    auto empty = search(protein, motif, search_options{}, &stats);
    CHECK(empty.endpoints.empty());
    CHECK(stats.short_circuited);
    CHECK(stats.chosen.empty());
}

TEST_CASE("search rejects gaps that reach past the text", "[match_engine]") {
    text_index abra(std::string("abracadabra"));
    CHECK_THROWS_AS(search(abra, parse_pattern("ab[2,11]ra")), invalid_argument);
    CHECK_NOTHROW(search(abra, parse_pattern("ab[2,10]ra")));
    vlg_pattern none;
    CHECK_THROWS_AS(search(abra, none), invalid_argument);
}

TEST_CASE("zero gap pairs an occurrence with itself", "[match_engine]") {
    text_index aa(std::string("aa"));
    auto p = parse_pattern("a[0,0]a");
    for (auto s : all_strategies) {
        auto r = search(aa, p, s, true);
        CHECK(r.endpoints == std::vector<pos_t>{0, 1});
        CHECK(r.tuples == std::vector<std::vector<pos_t>>{{0, 0}, {1, 1}});
    }
    CHECK(oracle_search("aa", p).endpoints == std::vector<pos_t>{0, 1});
}

TEST_CASE("oracle examples", "[match_engine]") {
    auto p = parse_pattern("ab[2,2]ra");
    auto r = oracle_search("abracadabra", p, true);
    CHECK(r.endpoints == std::vector<pos_t>{2, 9});
    CHECK(r.tuples == std::vector<std::vector<pos_t>>{{0, 2}, {7, 9}});
    CHECK(oracle_search("", p).endpoints.empty());
    CHECK(oracle_count_tuples("abracadabra", p) == 2);
    CHECK(oracle_count_tuples("aaaa", parse_pattern("a[0,3]a[0,3]a")) == 20);
}

TEST_CASE("tuple cap truncates in lexicographic order", "[match_engine]") {
    text_index idx(std::string("aaaaaa"));
    auto p = parse_pattern("a[1,2]a[1,2]a");
    auto full = oracle_search(idx.text(), p, true);
    REQUIRE(full.tuples.size() > 3);
    for (auto s : all_strategies) {
        auto capped = search(idx, p, s, true, 3);
        CHECK(capped.truncated);
        CHECK(capped.tuples == std::vector<std::vector<pos_t>>(full.tuples.begin(), full.tuples.begin() + 3));
        CHECK(capped.endpoints == full.endpoints);
        auto exact_cap = search(idx, p, s, true, full.tuples.size());
        CHECK_FALSE(exact_cap.truncated);
        CHECK(exact_cap.tuples == full.tuples);
    }
}

TEST_CASE("all strategies agree with the oracle", "[match_engine][property]") {
    xoshiro256ss rng(2024);
    for (int rep = 0; rep < 150; ++rep) {
        unsigned alphabet = std::vector<unsigned>{2, 4, 20, 64}[rng.below(4)];
        std::size_t n = 1 + rng.below(800);
        auto text = vlg::testing::random_text(rng, n, alphabet);
        text_index idx(text);
        vlg_pattern p;
        std::size_t k = 1 + rng.below(4);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t len = 1 + rng.below(3);
            if (rng.below(2) == 0 && len <= n)
                p.subpatterns.push_back(text.substr(rng.below(n - len + 1), len));
            else
                p.subpatterns.push_back(vlg::testing::random_text(rng, len, alphabet));
        }
        for (std::size_t i = 0; i + 1 < k; ++i) {
            pos_t lo = rng.below(n / 2 + 1);
            pos_t hi = std::min<pos_t>(n - 1, lo + rng.below(n / 4 + 1));
            lo = std::min(lo, hi);
            p.gaps.push_back({lo, hi});
        }
        auto expected = oracle_search(text, p, true, 5000);
        for (auto s : all_strategies) {
            INFO(render_pattern(p) << " strategy " << to_string(s));
            search_options opts;
            opts.kind = s;
            opts.want_tuples = true;
            opts.tuple_cap = 5000;
            opts.block_size = s == strategy::filter_sort ? (std::size_t{1} << rng.below(6)) : 0;
            auto got = search(idx, p, opts);
            REQUIRE(got == expected);
            REQUIRE(search(idx, p, s).endpoints == expected.endpoints);
        }
    }
}

TEST_CASE("candidate counts never grow across stages", "[match_engine]") {
    xoshiro256ss rng(77);
    auto text = vlg::testing::random_text(rng, 20000, 4);
    text_index idx(text);
    for (auto s : all_strategies) {
        for (int rep = 0; rep < 20; ++rep) {
            auto p = generate_patterns(text, 2 + rng.below(3), 2, {10, 40}, 1, rep)[0];
            search_options opts;
            opts.kind = s;
            search_stats stats;
            auto r = search(idx, p, opts, &stats);
            CHECK(stats.stage0 >= stats.stage1);
            CHECK(stats.stage1 >= stats.stage2);
            CHECK(stats.stage2 >= r.endpoints.size());
            for (auto c : stats.chosen)
                CHECK(c != strategy::automatic);
        }
    }
}
