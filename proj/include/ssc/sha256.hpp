#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ssc {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);

// Incremental builder for domain-separated hashes.
class HashInput {
public:
    HashInput& str(const std::string& s);  // raw bytes, no length prefix
    HashInput& bytes(std::span<const std::uint8_t> b);
    HashInput& u32(std::uint32_t v);  // little-endian
    HashInput& u64(std::uint64_t v);  // little-endian
    Digest digest() const;

private:
    std::vector<std::uint8_t> buf_;
};

std::string hex(const Digest& d);

}  // namespace ssc
