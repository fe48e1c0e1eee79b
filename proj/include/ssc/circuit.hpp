#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "ssc/defense.hpp"
#include "ssc/field.hpp"
#include "ssc/sha256.hpp"
#include "ssc/tensor.hpp"

namespace ssc::circuit {

inline constexpr std::uint32_t kDefaultFracBits = 8;

// Real number encoded as round(r * 2^frac_bits) in the field.
struct FixedPoint {
    field::Fe raw;
    std::uint32_t frac_bits = kDefaultFracBits;

    static FixedPoint encode(double r, std::uint32_t frac_bits);
    double decode() const;
};

struct LinTerm {
    std::uint64_t var;
    field::Fe coeff;
};

// One R1CS row: <a, z> * <b, z> = <c, z>.
struct Constraint {
    std::vector<LinTerm> a, b, c;
};

// Constraint system for the down-then-up bilinear blur of one image.
// Variable layout: z[0] = 1, then the public output pixels, then the private
// input pixels followed by per-channel intermediates in emission order.
struct R1CSSystem {
    std::uint64_t num_vars = 0;
    std::uint64_t num_public = 0;  // includes the constant-one slot
    std::vector<Constraint> constraints;

    // build parameters; not part of the wire format, re-derivable from a Statement
    defense::TransformSpec spec;
    std::uint32_t frac_bits = kDefaultFracBits;
    std::uint32_t width = 0, height = 0, channels = 0;

    std::uint64_t num_private() const { return num_vars - num_public; }
    std::uint64_t num_outputs() const { return num_public - 1; }

    bool row_satisfied(std::size_t i, const std::vector<std::uint64_t>& z) const;
    bool satisfied(const std::vector<std::uint64_t>& z, std::size_t* first_violated = nullptr) const;
    std::size_t count_violations(const std::vector<std::uint64_t>& z) const;

    // wire format: magic "R1CS", version u32, num_vars/num_public/num_constraints u64,
    // then per row three (count u64, (index u64, coeff u64)*) lists for A/B/C.
    std::vector<std::uint8_t> serialize() const;
    Digest digest() const;
};

// Public statement: the transform parameters, the output pixels (field raws)
// and a hash commitment to the encoded input pixels.
struct Statement {
    defense::TransformSpec spec;
    std::uint32_t frac_bits = kDefaultFracBits;
    std::uint32_t width = 0, height = 0, channels = 0;
    std::vector<std::uint64_t> outputs;
    Digest input_digest{};

    std::vector<std::uint8_t> serialize() const;
    static Statement deserialize(std::span<const std::uint8_t> bytes);
};

// Private assignment: input pixels plus all intermediate products, indexed
// from num_public upward.
struct Witness {
    std::vector<std::uint64_t> values;
};

R1CSSystem extract_circuit(const defense::TransformSpec& spec, int width, int height,
                           int channels = 3, std::uint32_t frac_bits = kDefaultFracBits);

std::pair<Statement, Witness> gen_witness(const R1CSSystem& system, const Tensor& image);

// Scale carried by input encodings and statement outputs.
std::uint32_t input_scale_bits(std::uint32_t frac_bits);   // 2F
std::uint32_t output_scale_bits(std::uint32_t frac_bits);  // 6F
double decode_output(std::uint64_t raw, std::uint32_t frac_bits);

std::vector<std::uint64_t> full_assignment(const R1CSSystem& system, const Statement& statement,
                                           const Witness& witness);

}  // namespace ssc::circuit
