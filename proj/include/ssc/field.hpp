#pragma once

#include <cstdint>

#include "ssc/errors.hpp"

namespace ssc::field {

// Goldilocks prime: 2^64 - 2^32 + 1.
inline constexpr std::uint64_t kPrime = 0xFFFFFFFF00000001ull;

// Element of F_p, value always in [0, p).
struct Fe {
    std::uint64_t v = 0;

    static Fe from_u64(std::uint64_t x) { return Fe{x % kPrime}; }
    bool operator==(const Fe&) const = default;
};

Fe add(Fe a, Fe b);
Fe sub(Fe a, Fe b);
Fe mul(Fe a, Fe b);
Fe neg(Fe a);
Fe pow(Fe a, std::uint64_t e);
Fe inv(Fe a);  // throws on a == 0

}  // namespace ssc::field
