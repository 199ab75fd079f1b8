#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "test_support.hpp"
#include "vlg/text_index.hpp"

using namespace vlg;
using vlg::testing::naive_suffix_array;

TEST_CASE("suffix array of small texts", "[text_index]") {
    CHECK(build_suffix_array("").empty());
    CHECK(build_suffix_array("banana") == std::vector<pos_t>{5, 3, 1, 0, 4, 2});
    CHECK(build_suffix_array("aaaa") == std::vector<pos_t>{3, 2, 1, 0});
    CHECK(build_suffix_array("a") == std::vector<pos_t>{0});
    CHECK(build_suffix_array("ba") == std::vector<pos_t>{1, 0});
    CHECK(build_suffix_array("ab") == std::vector<pos_t>{0, 1});
}

TEST_CASE("suffix array compares bytes unsigned", "[text_index]") {
    std::string s = "\x80\x01\xff\x00\x80";
    s.push_back('\x01');
    CHECK(build_suffix_array(s) == naive_suffix_array(s));
}

TEST_CASE("suffix array matches naive sort on random and periodic texts", "[text_index]") {
    xoshiro256ss rng(11);
    for (unsigned alphabet : {1u, 2u, 3u, 4u, 20u, 64u, 256u}) {
        for (int rep = 0; rep < 40; ++rep) {
            std::size_t n = rng.below(300);
            auto text = vlg::testing::random_text(rng, n, alphabet);
            INFO("alphabet " << alphabet << " n " << n);
            REQUIRE(build_suffix_array(text) == naive_suffix_array(text));
        }
    }
    for (std::string unit : {"ab", "abc", "aab", "abaab", "abracadabra"}) {
        for (std::size_t n : {1u, 7u, 64u, 513u}) {
            auto text = vlg::testing::periodic_text(unit, n);
            REQUIRE(build_suffix_array(text) == naive_suffix_array(text));
        }
    }
}

TEST_CASE("find_interval examples", "[text_index]") {
    text_index idx(std::string("banana"));
    auto ana = idx.find("ana");
    CHECK(ana.start == 1);
    CHECK(ana.end == 2);
    CHECK(idx.positions(ana) == std::vector<pos_t>{3, 1});
    CHECK(idx.find("x").empty());
    CHECK(idx.positions(idx.find("x")).empty());
    auto whole = idx.find("banana");
    CHECK(whole.start == 3);
    CHECK(whole.end == 3);
    CHECK(idx.positions(idx.find("na")) == std::vector<pos_t>{4, 2});
    CHECK(idx.find("bananas").empty());
    CHECK_THROWS_AS(idx.find(""), invalid_argument);
}

TEST_CASE("find_interval on empty text", "[text_index]") {
    text_index idx{std::string()};
    CHECK(idx.find("a").empty());
}

TEST_CASE("find_interval agrees with naive scan", "[text_index]") {
    xoshiro256ss rng(5);
    for (unsigned alphabet : {2u, 4u, 20u, 64u, 256u}) {
        for (int rep = 0; rep < 30; ++rep) {
            std::size_t n = 1 + rng.below(2000);
            auto text = vlg::testing::random_text(rng, n, alphabet);
            text_index idx(text);
            for (int q = 0; q < 20; ++q) {
                std::size_t len = 1 + rng.below(5);
                std::string sub;
                if (rng.below(2) == 0 && len <= n) {
                    sub = text.substr(rng.below(n - len + 1), len);
                } else {
                    sub = vlg::testing::random_text(rng, len, alphabet);
                }
                auto expected = vlg::testing::naive_find(text, sub);
                auto iv = idx.find(sub);
                REQUIRE(iv.size() == expected.size());
                auto got = idx.positions(iv);
                std::sort(got.begin(), got.end());
                REQUIRE(got == expected);
            }
        }
    }
}
