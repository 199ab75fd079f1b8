// vlg-corpus: write a seeded synthetic text of Zipf-distributed tokens,
// optionally with repeated stretches, for desk-scale benchmarking.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "vlg/corpus.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a seeded synthetic corpus"};
    vlg::corpus_options opts;
    std::string out_path = "-";
    app.add_option("-o,--output", out_path, "Output file, - for stdout");
    app.add_option("--length", opts.length, "Corpus length in bytes (accepts suffixes such as 64MiB)")
        ->transform(CLI::AsSizeValue(false));
    app.add_option("--alphabet", opts.alphabet, "Bytes tokens are drawn from");
    app.add_option("--vocabulary", opts.vocabulary, "Number of distinct tokens");
    app.add_option("--token-length", opts.token_length, "Bytes per token");
    app.add_option("--zipf", opts.zipf_exponent, "Zipf exponent of token frequencies")->check(CLI::NonNegativeNumber);
    app.add_option("--repeat-prob", opts.repeat_probability, "Per-token chance of copying earlier output")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--repeat-length", opts.repeat_length, "Bytes per copied stretch");
    app.add_option("--seed", opts.seed, "Generator seed");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const std::string text = vlg::generate_corpus(opts);
        if (out_path == "-") {
            std::cout.write(text.data(), static_cast<std::streamsize>(text.size()));
            std::cout.flush();
            return std::cout ? 0 : 2;
        }
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "vlg-corpus: cannot write " << out_path << '\n';
            return 2;
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            std::cerr << "vlg-corpus: error writing " << out_path << '\n';
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "vlg-corpus: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
