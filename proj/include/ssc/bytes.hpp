#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "ssc/errors.hpp"

namespace ssc {

// Little-endian byte writer/reader for the binary file formats.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void raw(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void magic(const char (&m)[5]) { buf_.insert(buf_.end(), m, m + 4); }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    const std::vector<std::uint8_t>& view() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    void raw(std::span<std::uint8_t> out) {
        auto b = take(out.size());
        std::memcpy(out.data(), b.data(), out.size());
    }
    void expect_magic(const char (&m)[5]) {
        const std::size_t at = pos_;
        auto b = take(4);
        if (std::memcmp(b.data(), m, 4) != 0)
            throw ParseError(std::string("expected magic '") + m + "'", at);
    }
    bool done() const { return pos_ == data_.size(); }
    std::size_t pos() const { return pos_; }
    void expect_done() const {
        if (!done()) throw ParseError("trailing bytes", pos_);
    }

private:
    std::span<const std::uint8_t> take(std::size_t n) {
        if (pos_ + n > data_.size()) throw ParseError("truncated input", data_.size());
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace ssc
