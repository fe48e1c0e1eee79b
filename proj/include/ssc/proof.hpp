#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ssc/circuit.hpp"
#include "ssc/sha256.hpp"

namespace ssc::proof {

// Security parameter; q is the number of spot-checked constraints.
struct SecurityParam {
    std::uint32_t lambda_sec = 80;
    std::uint32_t query_count(std::uint64_t num_constraints) const {
        return static_cast<std::uint32_t>(
            num_constraints < lambda_sec ? num_constraints : lambda_sec);
    }
};

// Transparent common reference string: both keys are hash-derived from the circuit.
struct Crs {
    struct Ek {
        Digest circuit_digest{};
        std::uint32_t q = 0;
        std::uint32_t frac_bits = 0;
        std::uint64_t field_id = 0;
    } ek;
    struct Vk {
        Digest circuit_digest{};
        std::uint32_t q = 0;
        std::uint64_t num_public = 0;
        std::uint64_t field_id = 0;
    } vk;

    std::vector<std::uint8_t> serialize_ek() const;
    std::vector<std::uint8_t> serialize_vk() const;
    static Ek deserialize_ek(std::span<const std::uint8_t> bytes);
    static Vk deserialize_vk(std::span<const std::uint8_t> bytes);
};

Crs keygen(const SecurityParam& security, const circuit::R1CSSystem& system);

struct OpeningEntry {
    std::uint64_t var = 0;
    std::uint64_t value = 0;
    std::array<std::uint8_t, 16> salt{};
    std::vector<Digest> path;  // sibling hashes, leaf to root
};

struct Opening {
    std::uint64_t constraint_index = 0;
    std::vector<OpeningEntry> entries;
};

struct Proof {
    Digest root{};
    std::vector<Opening> openings;

    // wire format: magic "SCPF", version u32, root 32B, q u32, then per opening
    // constraint_index u64, entry_count u32, entries
    // (var_index u64, value u64, salt 16B, path_len u32, path 32B*len).
    std::vector<std::uint8_t> serialize() const;
    static Proof deserialize(std::span<const std::uint8_t> bytes);
    std::size_t serialized_size() const;
};

// Builds the salted Merkle commitment and the Fiat-Shamir spot-check openings.
// Throws CircuitError when the assignment does not satisfy the system.
Proof prove(const circuit::R1CSSystem& system, const Crs::Ek& ek,
            const circuit::Statement& statement, const circuit::Witness& witness,
            std::uint64_t salt_seed);

// Same pipeline with the satisfaction check skipped; exists so soundness
// experiments can produce proofs over tampered witnesses.
Proof prove_unchecked(const circuit::R1CSSystem& system, const Crs::Ek& ek,
                      const circuit::Statement& statement, const circuit::Witness& witness,
                      std::uint64_t salt_seed);

enum class RejectReason {
    None = 0,
    Malformed,
    BadParams,
    QueryMismatch,
    WrongVariableSet,
    BadPath,
    ConstraintViolated,
};
const char* reject_reason_name(RejectReason r);

struct VerifyResult {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
    std::uint64_t detail = 0;  // offending constraint index, when applicable

    static VerifyResult accept() { return {true, RejectReason::None, 0}; }
    static VerifyResult reject(RejectReason r, std::uint64_t detail = 0) { return {false, r, detail}; }
};

// Total: every failure mode maps to a reject with a reason code.
VerifyResult verify(const circuit::R1CSSystem& system, const Crs::Vk& vk,
                    const circuit::Statement& statement, const Proof& proof);

// Convenience wrapper over raw bytes; parse failures reject as Malformed.
VerifyResult verify_bytes(const circuit::R1CSSystem& system, const Crs::Vk& vk,
                          std::span<const std::uint8_t> statement_bytes,
                          std::span<const std::uint8_t> proof_bytes);

std::vector<std::uint64_t> fiat_shamir_indices(const Crs::Vk& vk,
                                               std::span<const std::uint8_t> statement_bytes,
                                               const Digest& root, std::uint32_t q,
                                               std::uint64_t num_constraints);

// Deterministic cost model (SHA-256 invocation counts) used for overhead CSVs.
std::uint64_t prove_hash_ops(const circuit::R1CSSystem& system);
std::uint64_t verify_hash_ops(const circuit::R1CSSystem& system, const Proof& proof);
std::uint64_t witness_gen_ops(const circuit::R1CSSystem& system);

}  // namespace ssc::proof
