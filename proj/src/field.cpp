#include "ssc/field.hpp"

namespace ssc::field {

namespace {
constexpr std::uint64_t kEpsilon = 0xFFFFFFFFull;  // 2^32 - 1, = 2^64 mod p

// Reduce a 128-bit product using 2^64 = 2^32 - 1 (mod p), 2^96 = -1 (mod p).
std::uint64_t reduce128(unsigned __int128 x) {
    const std::uint64_t lo = static_cast<std::uint64_t>(x);
    const std::uint64_t hi = static_cast<std::uint64_t>(x >> 64);
    const std::uint64_t hi_hi = hi >> 32;
    const std::uint64_t hi_lo = hi & kEpsilon;

    std::uint64_t t = lo - hi_hi;
    if (lo < hi_hi) t -= kEpsilon;  // wrapping borrow adjustment

    const std::uint64_t mid = hi_lo * kEpsilon;
    std::uint64_t r = t + mid;
    if (r < t) r += kEpsilon;  // wrapping carry adjustment
    if (r >= kPrime) r -= kPrime;
    return r;
}
}  // namespace

Fe add(Fe a, Fe b) {
    std::uint64_t r = a.v + b.v;
    if (r < a.v)
        r += kEpsilon;  // wrapped past 2^64: sum - p = r + (2^64 - p)
    else if (r >= kPrime)
        r -= kPrime;
    return Fe{r};
}

Fe sub(Fe a, Fe b) {
    return a.v >= b.v ? Fe{a.v - b.v} : Fe{a.v + (kPrime - b.v)};
}

Fe neg(Fe a) { return a.v == 0 ? a : Fe{kPrime - a.v}; }

Fe mul(Fe a, Fe b) {
    return Fe{reduce128(static_cast<unsigned __int128>(a.v) * b.v)};
}

Fe pow(Fe a, std::uint64_t e) {
    Fe r{1};
    Fe base = a;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

Fe inv(Fe a) {
    if (a.v == 0) throw CircuitError("field inverse of zero");
    return pow(a, kPrime - 2);
}

}  // namespace ssc::field
