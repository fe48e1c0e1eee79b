#include "ssc/proof.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "ssc/bytes.hpp"

namespace ssc::proof {

using circuit::R1CSSystem;

std::vector<std::uint8_t> Crs::serialize_ek() const {
    ByteWriter w;
    w.magic("SCEK");
    w.u32(1);
    w.raw(ek.circuit_digest);
    w.u32(ek.q);
    w.u32(ek.frac_bits);
    w.u64(ek.field_id);
    return w.take();
}

std::vector<std::uint8_t> Crs::serialize_vk() const {
    ByteWriter w;
    w.magic("SCVK");
    w.u32(1);
    w.raw(vk.circuit_digest);
    w.u32(vk.q);
    w.u64(vk.num_public);
    w.u64(vk.field_id);
    return w.take();
}

Crs::Ek Crs::deserialize_ek(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("SCEK");
    if (r.u32() != 1) throw ParseError("unsupported ek version", 4);
    Ek ek;
    r.raw(ek.circuit_digest);
    ek.q = r.u32();
    ek.frac_bits = r.u32();
    ek.field_id = r.u64();
    r.expect_done();
    return ek;
}

Crs::Vk Crs::deserialize_vk(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("SCVK");
    if (r.u32() != 1) throw ParseError("unsupported vk version", 4);
    Vk vk;
    r.raw(vk.circuit_digest);
    vk.q = r.u32();
    vk.num_public = r.u64();
    vk.field_id = r.u64();
    r.expect_done();
    return vk;
}

Crs keygen(const SecurityParam& security, const R1CSSystem& system) {
    if (system.constraints.empty()) throw CircuitError("keygen: empty circuit");
    Crs crs;
    const Digest d = system.digest();
    const std::uint32_t q = security.query_count(system.constraints.size());
    crs.ek = {d, q, system.frac_bits, field::kPrime};
    crs.vk = {d, q, system.num_public, field::kPrime};
    return crs;
}

namespace {

Digest leaf_hash(const std::array<std::uint8_t, 16>& salt, std::uint64_t var, std::uint64_t value) {
    return HashInput().str("leaf:").bytes(salt).u64(var).u64(value).digest();
}

Digest node_hash(const Digest& left, const Digest& right) {
    return HashInput().str("node:").bytes(left).bytes(right).digest();
}

struct MerkleTree {
    std::vector<std::vector<Digest>> levels;  // levels[0] = leaves (padded to pow2)

    static MerkleTree build(std::vector<Digest> leaves) {
        std::size_t n = 1;
        while (n < leaves.size()) n <<= 1;
        leaves.resize(n, Digest{});
        MerkleTree t;
        t.levels.push_back(std::move(leaves));
        while (t.levels.back().size() > 1) {
            const auto& prev = t.levels.back();
            std::vector<Digest> next(prev.size() / 2);
            for (std::size_t i = 0; i < next.size(); ++i)
                next[i] = node_hash(prev[2 * i], prev[2 * i + 1]);
            t.levels.push_back(std::move(next));
        }
        return t;
    }

    const Digest& root() const { return levels.back()[0]; }

    std::vector<Digest> path(std::size_t leaf) const {
        std::vector<Digest> p;
        for (std::size_t lvl = 0; lvl + 1 < levels.size(); ++lvl) {
            p.push_back(levels[lvl][leaf ^ 1]);
            leaf >>= 1;
        }
        return p;
    }
};

bool check_path(const Digest& leaf, std::size_t index, const std::vector<Digest>& path,
                const Digest& root) {
    Digest cur = leaf;
    for (const Digest& sib : path) {
        cur = (index & 1) ? node_hash(sib, cur) : node_hash(cur, sib);
        index >>= 1;
    }
    return index == 0 && cur == root;
}

std::size_t tree_depth(std::uint64_t num_leaves) {
    std::size_t n = 1, depth = 0;
    while (n < num_leaves) {
        n <<= 1;
        ++depth;
    }
    return depth;
}

// Sorted private variables referenced by one constraint row.
std::vector<std::uint64_t> private_support(const R1CSSystem& system, const circuit::Constraint& row) {
    std::vector<std::uint64_t> vars;
    for (const auto* side : {&row.a, &row.b, &row.c})
        for (const circuit::LinTerm& t : *side)
            if (t.var >= system.num_public) vars.push_back(t.var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

Proof prove_impl(const R1CSSystem& system, const Crs::Ek& ek, const circuit::Statement& statement,
                 const circuit::Witness& witness, std::uint64_t salt_seed, bool check) {
    if (ek.circuit_digest != system.digest())
        throw CircuitError("evaluation key does not match this circuit");
    std::vector<std::uint64_t> z = circuit::full_assignment(system, statement, witness);
    if (check) {
        std::size_t bad = 0;
        if (!system.satisfied(z, &bad))
            throw CircuitError("witness does not satisfy constraint " + std::to_string(bad));
    }

    const std::uint64_t n_priv = system.num_private();
    std::vector<std::array<std::uint8_t, 16>> salts(n_priv);
    std::vector<Digest> leaves(n_priv);
    for (std::uint64_t i = 0; i < n_priv; ++i) {
        const Digest s = HashInput().str("salt:").u64(salt_seed).u64(i).digest();
        std::copy(s.begin(), s.begin() + 16, salts[i].begin());
        leaves[i] = leaf_hash(salts[i], system.num_public + i, witness.values[i]);
    }
    MerkleTree tree = MerkleTree::build(std::move(leaves));

    Proof proof;
    proof.root = tree.root();
    Crs::Vk vk{ek.circuit_digest, ek.q, system.num_public, field::kPrime};
    const std::vector<std::uint64_t> indices = fiat_shamir_indices(
        vk, statement.serialize(), proof.root, ek.q, system.constraints.size());

    for (std::uint64_t idx : indices) {
        Opening op;
        op.constraint_index = idx;
        for (std::uint64_t var : private_support(system, system.constraints[idx])) {
            const std::uint64_t leaf = var - system.num_public;
            op.entries.push_back({var, witness.values[leaf], salts[leaf], tree.path(leaf)});
        }
        proof.openings.push_back(std::move(op));
    }
    return proof;
}

}  // namespace

Proof prove(const R1CSSystem& system, const Crs::Ek& ek, const circuit::Statement& statement,
            const circuit::Witness& witness, std::uint64_t salt_seed) {
    return prove_impl(system, ek, statement, witness, salt_seed, true);
}

Proof prove_unchecked(const R1CSSystem& system, const Crs::Ek& ek,
                      const circuit::Statement& statement, const circuit::Witness& witness,
                      std::uint64_t salt_seed) {
    return prove_impl(system, ek, statement, witness, salt_seed, false);
}

std::vector<std::uint64_t> fiat_shamir_indices(const Crs::Vk& vk,
                                               std::span<const std::uint8_t> statement_bytes,
                                               const Digest& root, std::uint32_t q,
                                               std::uint64_t num_constraints) {
    const Digest seed =
        HashInput().str("fs:").bytes(vk.circuit_digest).bytes(statement_bytes).bytes(root).digest();
    std::vector<std::uint64_t> indices;
    std::set<std::uint64_t> seen;
    const std::uint64_t want = std::min<std::uint64_t>(q, num_constraints);
    for (std::uint64_t counter = 0; indices.size() < want; ++counter) {
        const Digest block = HashInput().str("fs:").bytes(seed).u64(counter).digest();
        for (std::size_t off = 0; off + 8 <= block.size() && indices.size() < want; off += 8) {
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(block[off + i]) << (8 * i);
            v %= num_constraints;
            if (seen.insert(v).second) indices.push_back(v);
        }
    }
    return indices;
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::None: return "ok";
        case RejectReason::Malformed: return "malformed";
        case RejectReason::BadParams: return "bad-params";
        case RejectReason::QueryMismatch: return "query-mismatch";
        case RejectReason::WrongVariableSet: return "wrong-variable-set";
        case RejectReason::BadPath: return "bad-path";
        case RejectReason::ConstraintViolated: return "constraint-violated";
    }
    return "?";
}

VerifyResult verify(const R1CSSystem& system, const Crs::Vk& vk,
                    const circuit::Statement& statement, const Proof& proof) {
    if (vk.field_id != field::kPrime || vk.num_public != system.num_public)
        return VerifyResult::reject(RejectReason::BadParams);
    if (statement.outputs.size() != system.num_outputs())
        return VerifyResult::reject(RejectReason::Malformed);

    const std::uint64_t m = system.constraints.size();
    const std::vector<std::uint64_t> want =
        fiat_shamir_indices(vk, statement.serialize(), proof.root, vk.q, m);
    if (proof.openings.size() != want.size())
        return VerifyResult::reject(RejectReason::QueryMismatch);

    const std::size_t depth = tree_depth(system.num_private());

    for (std::size_t i = 0; i < want.size(); ++i) {
        const Opening& op = proof.openings[i];
        if (op.constraint_index != want[i])
            return VerifyResult::reject(RejectReason::QueryMismatch, op.constraint_index);
        const circuit::Constraint& row = system.constraints[op.constraint_index];

        const std::vector<std::uint64_t> support = private_support(system, row);
        if (op.entries.size() != support.size())
            return VerifyResult::reject(RejectReason::WrongVariableSet, op.constraint_index);

        // Opened values for this row, checked against the commitment.
        std::vector<std::pair<std::uint64_t, std::uint64_t>> opened;
        for (std::size_t e = 0; e < op.entries.size(); ++e) {
            const OpeningEntry& entry = op.entries[e];
            if (entry.var != support[e])
                return VerifyResult::reject(RejectReason::WrongVariableSet, op.constraint_index);
            if (entry.path.size() != depth)
                return VerifyResult::reject(RejectReason::Malformed, op.constraint_index);
            if (!check_path(leaf_hash(entry.salt, entry.var, entry.value),
                            entry.var - system.num_public, entry.path, proof.root))
                return VerifyResult::reject(RejectReason::BadPath, op.constraint_index);
            opened.emplace_back(entry.var, entry.value);
        }

        auto value_of = [&](std::uint64_t var) -> std::uint64_t {
            if (var == 0) return 1;
            if (var < system.num_public) return statement.outputs[var - 1];
            const auto it = std::lower_bound(opened.begin(), opened.end(),
                                             std::make_pair(var, std::uint64_t{0}));
            return it->second;  // support check above guarantees presence
        };
        auto dot = [&](const std::vector<circuit::LinTerm>& terms) {
            field::Fe acc{0};
            for (const circuit::LinTerm& t : terms)
                acc = field::add(acc, field::mul(t.coeff, field::Fe{value_of(t.var) % field::kPrime}));
            return acc;
        };
        if (!(field::mul(dot(row.a), dot(row.b)) == dot(row.c)))
            return VerifyResult::reject(RejectReason::ConstraintViolated, op.constraint_index);
    }
    return VerifyResult::accept();
}

VerifyResult verify_bytes(const R1CSSystem& system, const Crs::Vk& vk,
                          std::span<const std::uint8_t> statement_bytes,
                          std::span<const std::uint8_t> proof_bytes) {
    try {
        const circuit::Statement st = circuit::Statement::deserialize(statement_bytes);
        const Proof p = Proof::deserialize(proof_bytes);
        return verify(system, vk, st, p);
    } catch (const ParseError&) {
        return VerifyResult::reject(RejectReason::Malformed);
    } catch (const Error&) {
        return VerifyResult::reject(RejectReason::Malformed);
    }
}

std::vector<std::uint8_t> Proof::serialize() const {
    ByteWriter w;
    w.magic("SCPF");
    w.u32(1);
    w.raw(root);
    w.u32(static_cast<std::uint32_t>(openings.size()));
    for (const Opening& op : openings) {
        w.u64(op.constraint_index);
        w.u32(static_cast<std::uint32_t>(op.entries.size()));
        for (const OpeningEntry& e : op.entries) {
            w.u64(e.var);
            w.u64(e.value);
            w.raw(e.salt);
            w.u32(static_cast<std::uint32_t>(e.path.size()));
            for (const Digest& d : e.path) w.raw(d);
        }
    }
    return w.take();
}

Proof Proof::deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("SCPF");
    if (r.u32() != 1) throw ParseError("unsupported proof version", 4);
    Proof p;
    r.raw(p.root);
    const std::uint32_t q = r.u32();
    if (q > (1u << 24)) throw ParseError("implausible opening count", r.pos());
    p.openings.resize(q);
    for (Opening& op : p.openings) {
        op.constraint_index = r.u64();
        const std::uint32_t n = r.u32();
        if (n > (1u << 24)) throw ParseError("implausible entry count", r.pos());
        op.entries.resize(n);
        for (OpeningEntry& e : op.entries) {
            e.var = r.u64();
            e.value = r.u64();
            r.raw(e.salt);
            const std::uint32_t len = r.u32();
            if (len > 64) throw ParseError("implausible path length", r.pos());
            e.path.resize(len);
            for (Digest& d : e.path) r.raw(d);
        }
    }
    r.expect_done();
    return p;
}

std::size_t Proof::serialized_size() const {
    std::size_t s = 4 + 4 + 32 + 4;
    for (const Opening& op : openings) {
        s += 8 + 4;
        for (const OpeningEntry& e : op.entries) s += 8 + 8 + 16 + 4 + 32 * e.path.size();
    }
    return s;
}

std::uint64_t prove_hash_ops(const R1CSSystem& system) {
    const std::uint64_t n = system.num_private();
    std::uint64_t padded = 1;
    while (padded < n) padded <<= 1;
    // salts + leaves + internal nodes + FS derivation
    return n /*salts*/ + n /*leaves*/ + (padded - 1) /*nodes*/ + 2;
}

std::uint64_t verify_hash_ops(const R1CSSystem& system, const Proof& proof) {
    const std::size_t depth = tree_depth(system.num_private());
    std::uint64_t ops = 2;  // FS derivation
    for (const Opening& op : proof.openings) ops += op.entries.size() * (1 + depth);
    return ops;
}

std::uint64_t witness_gen_ops(const R1CSSystem& system) {
    // field multiply-accumulates, one per linear term, plus the input commitment hash
    std::uint64_t terms = 0;
    for (const auto& row : system.constraints) terms += row.a.size();
    return terms + 1;
}

}  // namespace ssc::proof
