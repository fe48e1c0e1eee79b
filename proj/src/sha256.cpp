#include "ssc/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace ssc {

Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw std::runtime_error("SHA-256 computation failed");
    return out;
}

HashInput& HashInput::str(const std::string& s) {
    buf_.insert(buf_.end(), s.begin(), s.end());
    return *this;
}

HashInput& HashInput::bytes(std::span<const std::uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
    return *this;
}

HashInput& HashInput::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

HashInput& HashInput::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

Digest HashInput::digest() const { return sha256(buf_); }

std::string hex(const Digest& d) {
    static const char* k = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (std::uint8_t b : d) {
        s.push_back(k[b >> 4]);
        s.push_back(k[b & 0xF]);
    }
    return s;
}

}  // namespace ssc
