#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

namespace vlg {

// Stable LSD radix sort, 8 bits per pass. Passes above the highest non-zero
// byte of the maximum key are skipped, as is any pass in which every key has
// the same digit. `scratch` is resized as needed and may be reused by callers.
template <std::unsigned_integral T>
void radix_sort(std::vector<T>& a, std::vector<T>& scratch) {
    const std::size_t n = a.size();
    if (n < 2)
        return;
    const T max_key = *std::max_element(a.begin(), a.end());
    const unsigned passes = (static_cast<unsigned>(std::bit_width(max_key)) + 7) / 8;
    scratch.resize(n);

    // All digit histograms in one read of the input.
    std::array<std::array<std::size_t, 256>, sizeof(T)> count{};
    for (std::size_t i = 0; i < n; ++i) {
        T x = a[i];
        for (unsigned pass = 0; pass < passes; ++pass)
            ++count[pass][(x >> (8 * pass)) & 0xFF];
    }

    T* src = a.data();
    T* dst = scratch.data();
    for (unsigned pass = 0; pass < passes; ++pass) {
        const unsigned shift = 8 * pass;
        auto& offsets = count[pass];
        if (offsets[(src[0] >> shift) & 0xFF] == n)
            continue;
        std::size_t sum = 0;
        for (auto& c : offsets) {
            std::size_t t = c;
            c = sum;
            sum += t;
        }
        for (std::size_t i = 0; i < n; ++i)
            dst[offsets[(src[i] >> shift) & 0xFF]++] = src[i];
        std::swap(src, dst);
    }
    if (src != a.data())
        std::copy(src, src + n, a.data());
}

template <std::unsigned_integral T>
void radix_sort(std::vector<T>& a) {
    std::vector<T> scratch;
    radix_sort(a, scratch);
}

template <std::unsigned_integral T>
std::vector<T> radix_sorted(std::span<const T> a) {
    std::vector<T> out(a.begin(), a.end());
    radix_sort(out);
    return out;
}

} // namespace vlg
