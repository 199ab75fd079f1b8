#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "vlg/error.hpp"
#include "vlg/random.hpp"

namespace vlg {

// Seeded synthetic text: a stream of fixed-length tokens drawn from a Zipf
// distribution over a random vocabulary, with optional copies of earlier
// stretches of output to model repetitive collections.
struct corpus_options {
    std::size_t length = std::size_t{1} << 20;
    std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    std::size_t vocabulary = 1u << 14;
    std::size_t token_length = 3;
    double zipf_exponent = 1.0;
    double repeat_probability = 0.0; // chance, per token, of copying earlier output instead
    std::size_t repeat_length = 256;
    std::uint64_t seed = 1;
};

inline std::string generate_corpus(const corpus_options& opts) {
    if (opts.alphabet.empty())
        throw invalid_argument("corpus alphabet is empty");
    if (opts.token_length == 0 || opts.vocabulary == 0)
        throw invalid_argument("token length and vocabulary must be positive");

    xoshiro256ss rng(opts.seed);

    double distinct = std::pow(static_cast<double>(opts.alphabet.size()), static_cast<double>(opts.token_length));
    std::size_t vocab = distinct < static_cast<double>(opts.vocabulary) ? static_cast<std::size_t>(distinct)
                                                                        : opts.vocabulary;
    std::vector<std::string> tokens;
    std::unordered_set<std::string> seen;
    while (tokens.size() < vocab) {
        std::string t(opts.token_length, '\0');
        for (auto& c : t)
            c = opts.alphabet[rng.below(opts.alphabet.size())];
        if (seen.insert(t).second)
            tokens.push_back(std::move(t));
    }

    // cdf[r] = P(rank <= r); the last entry is pinned to 1 exactly.
    std::vector<double> cdf(vocab);
    double total = 0;
    for (std::size_t r = 0; r < vocab; ++r) {
        const double rank = static_cast<double>(r + 1);
        total += opts.zipf_exponent == 1.0 ? 1.0 / rank : std::pow(rank, -opts.zipf_exponent);
        cdf[r] = total;
    }
    for (auto& c : cdf)
        c /= total;
    cdf.back() = 1.0;

    std::string out;
    out.reserve(opts.length + opts.repeat_length + opts.token_length);
    while (out.size() < opts.length) {
        if (opts.repeat_probability > 0 && out.size() > opts.repeat_length &&
            rng.unit() < opts.repeat_probability) {
            std::size_t from = rng.below(out.size() - opts.repeat_length);
            for (std::size_t i = 0; i < opts.repeat_length; ++i)
                out.push_back(out[from + i]);
            continue;
        }
        double u = rng.unit();
        auto rank = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        out += tokens[std::min(rank, vocab - 1)];
    }
    out.resize(opts.length);
    return out;
}

} // namespace vlg
