#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vlg {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text too long for the index format (n >= 2^40).
class capacity_error : public error {
public:
    using error::error;
};

class invalid_argument : public error {
public:
    using error::error;
};

// Index file problems. Each failure mode has its own type so callers can
// tell a foreign file from a damaged one.
class index_format_error : public error {
public:
    using error::error;
};

class index_truncated_error : public error {
public:
    using error::error;
};

class index_checksum_error : public error {
public:
    using error::error;
};

class pattern_error : public error {
public:
    pattern_error(const std::string& what, std::size_t offset)
        : error(what + " at offset " + std::to_string(offset)), message_(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t offset_;
};

} // namespace vlg
