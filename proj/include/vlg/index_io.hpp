#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "vlg/error.hpp"
#include "vlg/text_index.hpp"

// Index file layout, little-endian:
//
//   "VLGIDX01"          8 bytes magic
//   width               u8, bytes per SA entry (5 or 8)
//   reserved            7 zero bytes
//   n                   u64
//   text                n bytes
//   sa                  n * width bytes
//   checksum            u64, CRC-64/XZ of every preceding byte
namespace vlg {

inline constexpr std::array<char, 8> index_magic = {'V', 'L', 'G', 'I', 'D', 'X', '0', '1'};
inline constexpr std::size_t index_header_size = 24;

// CRC-64/XZ (ECMA-182 polynomial, reflected, all-ones init and xor-out).
using crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, 0xFFFFFFFFFFFFFFFFULL,
                                 0xFFFFFFFFFFFFFFFFULL, true, true>;

namespace detail {

class checked_writer {
public:
    explicit checked_writer(std::ostream& out) : out_(out) {}

    void write(const void* data, std::size_t len) {
        crc_.process_bytes(data, len);
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    }

    void write_le(std::uint64_t value, unsigned width) {
        unsigned char buf[8];
        for (unsigned b = 0; b < width; ++b)
            buf[b] = static_cast<unsigned char>(value >> (8 * b));
        write(buf, width);
    }

    std::uint64_t checksum() const { return crc_.checksum(); }

private:
    std::ostream& out_;
    crc64 crc_;
};

class checked_reader {
public:
    explicit checked_reader(std::istream& in) : in_(in) {}

    void read(void* data, std::size_t len, const char* what) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
        if (static_cast<std::size_t>(in_.gcount()) != len)
            throw index_truncated_error(std::string("index file truncated while reading ") + what);
        crc_.process_bytes(data, len);
    }

    std::uint64_t read_le(unsigned width, const char* what) {
        unsigned char buf[8];
        read(buf, width, what);
        return decode_le(buf, width);
    }

    static std::uint64_t decode_le(const unsigned char* buf, unsigned width) {
        std::uint64_t v = 0;
        for (unsigned b = 0; b < width; ++b)
            v |= std::uint64_t{buf[b]} << (8 * b);
        return v;
    }

    std::uint64_t checksum() const { return crc_.checksum(); }
    std::istream& stream() { return in_; }

private:
    std::istream& in_;
    crc64 crc_;
};

} // namespace detail

inline void save_index(const text_index& index, std::ostream& out, unsigned width = 5) {
    if (width != 5 && width != 8)
        throw invalid_argument("position width must be 5 or 8, got " + std::to_string(width));
    if (index.size() > max_text_length)
        throw capacity_error("text exceeds the index format limit");

    detail::checked_writer w(out);
    w.write(index_magic.data(), index_magic.size());
    unsigned char header[8] = {static_cast<unsigned char>(width), 0, 0, 0, 0, 0, 0, 0};
    w.write(header, sizeof header);
    w.write_le(index.size(), 8);
    w.write(index.text().data(), index.size());

    // Encode SA entries through a bounded buffer rather than one byte at a time.
    constexpr std::size_t chunk = 1 << 16;
    std::vector<unsigned char> buf(chunk * width);
    auto sa = index.sa();
    for (std::size_t off = 0; off < sa.size(); off += chunk) {
        std::size_t cnt = std::min(chunk, sa.size() - off);
        unsigned char* p = buf.data();
        for (std::size_t i = 0; i < cnt; ++i)
            for (unsigned b = 0; b < width; ++b)
                *p++ = static_cast<unsigned char>(sa[off + i] >> (8 * b));
        w.write(buf.data(), cnt * width);
    }

    std::uint64_t crc = w.checksum();
    unsigned char tail[8];
    for (unsigned b = 0; b < 8; ++b)
        tail[b] = static_cast<unsigned char>(crc >> (8 * b));
    out.write(reinterpret_cast<const char*>(tail), 8);
    if (!out)
        throw error("failed writing index");
}

inline void save_index(const text_index& index, const std::string& path, unsigned width = 5) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw error("cannot open " + path + " for writing");
    save_index(index, out, width);
    out.flush();
    if (!out)
        throw error("failed writing " + path);
}

struct loaded_index {
    text_index index;
    unsigned width = 5;
};

inline loaded_index load_index_with_width(std::istream& in) {
    detail::checked_reader r(in);

    std::array<char, 8> magic{};
    r.read(magic.data(), magic.size(), "magic");
    if (magic != index_magic)
        throw index_format_error("not a VLG index file (bad magic)");

    unsigned char header[8];
    r.read(header, sizeof header, "header");
    unsigned width = header[0];
    if (width != 5 && width != 8)
        throw index_format_error("unsupported position width " + std::to_string(width));
    for (int i = 1; i < 8; ++i)
        if (header[i] != 0)
            throw index_format_error("reserved header bytes are not zero");

    std::uint64_t n = r.read_le(8, "length");
    if (n > max_text_length)
        throw index_format_error("declared length exceeds the format limit");

    // Reads grow the buffers incrementally so a corrupt length cannot force a huge allocation.
    constexpr std::size_t chunk = std::size_t{1} << 20;
    std::string text;
    while (text.size() < n) {
        std::size_t cnt = static_cast<std::size_t>(std::min<std::uint64_t>(chunk, n - text.size()));
        std::size_t old = text.size();
        text.resize(old + cnt);
        r.read(text.data() + old, cnt, "text");
    }

    std::vector<pos_t> sa;
    std::vector<unsigned char> buf;
    bool out_of_range = false;
    while (sa.size() < n) {
        std::size_t cnt = static_cast<std::size_t>(std::min<std::uint64_t>(chunk, n - sa.size()));
        buf.resize(cnt * width);
        r.read(buf.data(), buf.size(), "suffix array");
        for (std::size_t i = 0; i < cnt; ++i) {
            pos_t p = detail::checked_reader::decode_le(buf.data() + i * width, width);
            out_of_range |= p >= n;
            sa.push_back(p);
        }
    }

    std::uint64_t expected = r.checksum();
    unsigned char tail[8];
    in.read(reinterpret_cast<char*>(tail), 8);
    if (in.gcount() != 8)
        throw index_truncated_error("index file truncated while reading checksum");
    if (detail::checked_reader::decode_le(tail, 8) != expected)
        throw index_checksum_error("index checksum mismatch");
    if (in.peek() != std::char_traits<char>::eof())
        throw index_format_error("trailing bytes after checksum");
    if (out_of_range)
        throw index_format_error("suffix array entry out of range");

    return {text_index(std::move(text), std::move(sa)), width};
}

inline text_index load_index(std::istream& in) { return load_index_with_width(in).index; }

inline text_index load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error("cannot open " + path);
    return load_index(in);
}

} // namespace vlg
