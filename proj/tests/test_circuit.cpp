#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "helpers.hpp"
#include "ssc/circuit.hpp"
#include "ssc/defense.hpp"

using namespace ssc;
using field::Fe;

namespace {

// Big-integer oracle for field arithmetic.
std::uint64_t mod_add(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) + b) % field::kPrime);
}
std::uint64_t mod_sub(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) + field::kPrime - b) % field::kPrime);
}
std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % field::kPrime);
}

// Independent count of blur constraints, walking the same sample grid.
std::size_t expected_constraints(const defense::TransformSpec& spec, int w, int h, int ch,
                                 std::uint32_t frac_bits) {
    const int mid_w = defense::scaled_dim(w, spec);
    const int mid_h = defense::scaled_dim(h, spec);
    if (mid_w == w && mid_h == h) return static_cast<std::size_t>(w) * h * ch;

    const std::uint64_t one = 1ull << frac_bits;
    auto axis_taps = [&](int i, int src, int dst) -> int {
        const AxisSample s = axis_sample(i, src, dst);
        if (s.hi == s.lo) return 1;
        const std::uint64_t w_hi =
            static_cast<std::uint64_t>(std::llround(s.frac * static_cast<double>(one)));
        return (w_hi == 0 || w_hi == one) ? 1 : 2;
    };
    auto stage_rows = [&](int src_w, int src_h, int dst_w, int dst_h) {
        std::size_t rows = 0;
        for (int y = 0; y < dst_h; ++y)
            for (int x = 0; x < dst_w; ++x) {
                const int taps = axis_taps(x, src_w, dst_w) * axis_taps(y, src_h, dst_h);
                rows += taps == 1 ? 1 : static_cast<std::size_t>(taps) + 1;
            }
        return rows;
    };
    return static_cast<std::size_t>(ch) *
           (stage_rows(w, h, mid_w, mid_h) + stage_rows(mid_w, mid_h, w, h));
}

}  // namespace

TEST_CASE("field arithmetic matches a 128-bit oracle on 1000 random pairs") {
    SplitMix64 rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        // bias some draws toward the top of the range to stress the reduction
        std::uint64_t a = rng.next_u64();
        std::uint64_t b = rng.next_u64();
        if (trial % 4 == 0) a = field::kPrime - 1 - (a % 1000);
        if (trial % 4 == 1) b = field::kPrime - 1 - (b % 1000);
        a %= field::kPrime;
        b %= field::kPrime;
        CHECK(field::add(Fe{a}, Fe{b}).v == mod_add(a, b));
        CHECK(field::sub(Fe{a}, Fe{b}).v == mod_sub(a, b));
        CHECK(field::mul(Fe{a}, Fe{b}).v == mod_mul(a, b));
        CHECK(field::add(Fe{a}, field::neg(Fe{a})).v == 0);
    }
}

TEST_CASE("field edge cases") {
    CHECK(field::add(Fe{field::kPrime - 1}, Fe{1}).v == 0);
    CHECK(Fe::from_u64(field::kPrime).v == 0);
    CHECK(field::mul(Fe{2}, field::inv(Fe{2})).v == 1);
    CHECK_THROWS_AS(field::inv(Fe{0}), CircuitError);
    SplitMix64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Fe a{rng.next_u64() % (field::kPrime - 1) + 1};
        CHECK(field::mul(a, field::inv(a)).v == 1);
        CHECK(field::pow(a, field::kPrime - 1).v == 1);  // Fermat
    }
}

TEST_CASE("fixed point encodes round(r * 2^F) and enforces its range") {
    const auto fp = circuit::FixedPoint::encode(0.5, 8);
    CHECK(fp.raw.v == 128);
    CHECK(fp.decode() == 0.5);
    CHECK(circuit::FixedPoint::encode(0.0, 8).raw.v == 0);
    CHECK(circuit::FixedPoint::encode(255.999, 4).raw.v == 4096);
    CHECK_THROWS_AS(circuit::FixedPoint::encode(-0.1, 8), CircuitError);
    CHECK_THROWS_AS(circuit::FixedPoint::encode(256.0, 8), CircuitError);
}

TEST_CASE("1x1 identity circuit: one row computing out = 2^(4F) * in") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 1}, 1, 1, 1, 8);
    REQUIRE(sys.constraints.size() == 1);
    CHECK(sys.num_public == 2);
    CHECK(sys.num_vars == 3);
    Tensor img(1, 1, 1, 0.5);
    const auto [st, wit] = circuit::gen_witness(sys, img);
    REQUIRE(st.outputs.size() == 1);
    CHECK(wit.values.size() == 1);
    CHECK(wit.values[0] == 0x8000);  // 0.5 at scale 2^16
    CHECK(st.outputs[0] == (0x8000ull << 32));  // times 2^(4*8)
    CHECK(circuit::decode_output(st.outputs[0], 8) == 0.5);
    CHECK(sys.satisfied(circuit::full_assignment(sys, st, wit)));
}

TEST_CASE("constraint counts match an independent sample-grid walk") {
    struct Case {
        defense::TransformSpec spec;
        int w, h, ch;
    };
    const Case cases[] = {
        {{1, 2}, 2, 2, 3}, {{1, 2}, 4, 4, 3}, {{1, 2}, 5, 3, 2},
        {{3, 4}, 4, 4, 1}, {{1, 4}, 8, 8, 3}, {{1, 1}, 4, 4, 3},
    };
    for (const Case& c : cases) {
        const auto sys = circuit::extract_circuit(c.spec, c.w, c.h, c.ch, 8);
        CHECK(sys.constraints.size() == expected_constraints(c.spec, c.w, c.h, c.ch, 8));
        CHECK(sys.num_public == 1 + static_cast<std::uint64_t>(c.w) * c.h * c.ch);
    }
}

TEST_CASE("every row stays sparse") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 6, 6, 3, 8);
    for (const auto& row : sys.constraints) {
        CHECK(row.a.size() <= 4);
        CHECK(row.b.size() == 1);
        CHECK(row.c.size() == 1);
    }
}

TEST_CASE("honest witnesses satisfy every constraint (random 4x4 images)") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 8);
    SplitMix64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Tensor img = testutil::random_tensor(rng, 4, 4, 3);
        const auto [st, wit] = circuit::gen_witness(sys, img);
        std::size_t first = 0;
        CHECK(sys.satisfied(circuit::full_assignment(sys, st, wit), &first));
        CHECK(sys.count_violations(circuit::full_assignment(sys, st, wit)) == 0);
    }
}

TEST_CASE("adding 1 to any single variable violates at least one constraint") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 2, 2, 3, 8);
    SplitMix64 rng(4);
    const Tensor img = testutil::random_tensor(rng, 2, 2, 3);
    const auto [st, wit] = circuit::gen_witness(sys, img);
    const auto z0 = circuit::full_assignment(sys, st, wit);
    REQUIRE(sys.satisfied(z0));
    for (std::size_t i = 1; i < z0.size(); ++i) {  // skip the constant-one slot
        auto z = z0;
        z[i] = mod_add(z[i], 1);
        CHECK(sys.count_violations(z) >= 1);
    }
}

TEST_CASE("decoded circuit outputs track the floating-point blur") {
    SplitMix64 rng(5);
    for (std::uint32_t frac_bits : {6u, 8u, 10u}) {
        const auto spec = defense::TransformSpec{1, 2};
        const auto sys = circuit::extract_circuit(spec, 6, 4, 3, frac_bits);
        const Tensor img = testutil::random_tensor(rng, 6, 4, 3);
        const auto [st, wit] = circuit::gen_witness(sys, img);
        const Tensor want = defense::defend_transform(img, spec);
        const double tol = std::exp2(-static_cast<double>(frac_bits) + 1.0);
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(std::abs(circuit::decode_output(st.outputs[i], frac_bits) - want.data()[i]) <=
                  tol);
    }
}

TEST_CASE("extraction rejects bad parameters") {
    CHECK_THROWS_AS(circuit::extract_circuit(defense::TransformSpec{1, 2}, 0, 4, 3, 8),
                    DimensionError);
    CHECK_THROWS_AS(circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 0),
                    CircuitError);
    CHECK_THROWS_AS(circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 11),
                    CircuitError);
    // denominator 3 does not divide 2^8
    CHECK_THROWS_AS(circuit::extract_circuit(defense::TransformSpec{1, 3}, 4, 4, 3, 8),
                    CircuitError);
}

TEST_CASE("gen_witness validates image dims and pixel range") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 8);
    CHECK_THROWS_AS(circuit::gen_witness(sys, Tensor(4, 4, 1, 0.5)), DimensionError);
    CHECK_THROWS_AS(circuit::gen_witness(sys, Tensor(2, 2, 3, 0.5)), DimensionError);
    Tensor bad(4, 4, 3, 0.5);
    bad.at(1, 1, 0) = 1.5;
    CHECK_THROWS_AS(circuit::gen_witness(sys, bad), CircuitError);
    bad.at(1, 1, 0) = -0.1;
    CHECK_THROWS_AS(circuit::gen_witness(sys, bad), CircuitError);
}

TEST_CASE("witness generation is deterministic, input commitment is binding") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 8);
    SplitMix64 rng(6);
    const Tensor img = testutil::random_tensor(rng, 4, 4, 3);
    const auto [st1, w1] = circuit::gen_witness(sys, img);
    const auto [st2, w2] = circuit::gen_witness(sys, img);
    CHECK(st1.serialize() == st2.serialize());
    CHECK(w1.values == w2.values);

    Tensor other = img;
    other.at(0, 0, 0) = other.at(0, 0, 0) < 0.5 ? other.at(0, 0, 0) + 0.25
                                                : other.at(0, 0, 0) - 0.25;
    const auto [st3, w3] = circuit::gen_witness(sys, other);
    CHECK(st1.input_digest != st3.input_digest);
}

TEST_CASE("statement serialization round-trips and rejects malformed bytes") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 3, 2, 3, 8);
    SplitMix64 rng(7);
    const auto [st, wit] = circuit::gen_witness(sys, testutil::random_tensor(rng, 3, 2, 3));
    const auto bytes = st.serialize();
    const auto back = circuit::Statement::deserialize(bytes);
    CHECK(back.spec == st.spec);
    CHECK(back.frac_bits == st.frac_bits);
    CHECK(back.width == st.width);
    CHECK(back.height == st.height);
    CHECK(back.channels == st.channels);
    CHECK(back.outputs == st.outputs);
    CHECK(back.input_digest == st.input_digest);

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(circuit::Statement::deserialize(bad_magic), ParseError);
    auto truncated = bytes;
    truncated.resize(truncated.size() - 5);
    CHECK_THROWS_AS(circuit::Statement::deserialize(truncated), ParseError);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(circuit::Statement::deserialize(trailing), ParseError);
    auto bad_version = bytes;
    bad_version[4] = 9;
    CHECK_THROWS_AS(circuit::Statement::deserialize(bad_version), ParseError);
}

TEST_CASE("circuit serialization is deterministic and digest is shape-sensitive") {
    const auto a = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 8);
    const auto b = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 8);
    const auto c = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 6, 3, 8);
    CHECK(a.serialize() == b.serialize());
    CHECK(a.digest() == b.digest());
    CHECK_FALSE(a.digest() == c.digest());
    CHECK(a.serialize()[0] == 'R');  // "R1CS" wire magic
}

TEST_CASE("full_assignment rejects mismatched pieces") {
    const auto sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 2, 2, 1, 8);
    SplitMix64 rng(8);
    auto [st, wit] = circuit::gen_witness(sys, testutil::random_tensor(rng, 2, 2, 1));
    auto short_wit = wit;
    short_wit.values.pop_back();
    CHECK_THROWS_AS(circuit::full_assignment(sys, st, short_wit), DimensionError);
    auto short_st = st;
    short_st.outputs.pop_back();
    CHECK_THROWS_AS(circuit::full_assignment(sys, short_st, wit), DimensionError);
}
