#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "ssc/sha256.hpp"

namespace ssc::chain {

enum class Verdict : std::uint8_t { Reject = 0, Accept = 1 };

struct VerifyTx {
    Digest id{};  // H(statement_bytes || proof_bytes)
    std::vector<std::uint8_t> statement_bytes;
    std::vector<std::uint8_t> proof_bytes;
    std::uint32_t submitter = 0;
    std::optional<Verdict> verdict;  // set at execution, immutable afterwards

    static VerifyTx make(std::vector<std::uint8_t> statement_bytes,
                         std::vector<std::uint8_t> proof_bytes, std::uint32_t submitter);
    std::size_t payload_bytes() const { return statement_bytes.size() + proof_bytes.size(); }
};

struct Block {
    std::uint64_t height = 0;
    Digest prev_hash{};
    std::vector<VerifyTx> txs;
    std::uint32_t proposer = 0;
    std::vector<std::uint32_t> votes;  // node-id tags stand in for signatures

    Digest hash() const;
};

struct NodeState {
    std::uint32_t id = 0;
    std::vector<Block> ledger;
    std::vector<VerifyTx> mempool;
};

struct NetConfig {
    std::uint32_t n = 4;
    std::uint32_t f = 1;  // tolerated silent faults; n == 3f + 1 unless crash_free
    bool crash_free = false;
    double latency_base_ms = 1.0;
    double latency_per_kb_ms = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
    std::uint32_t quorum() const { return 2 * effective_f() + 1; }
    std::uint32_t effective_f() const { return crash_free ? (n - 1) / 3 : f; }
};

// The "smart contract": deterministic verdict over a transaction's bytes.
using Executor = std::function<Verdict(const VerifyTx&)>;
Executor rejecting_executor();  // treats every payload as unverifiable

// Deterministic single-threaded discrete-event simulation of a leader-based
// quorum protocol over a ring topology. Simulated milliseconds, never wall clock.
class Simulation {
public:
    Simulation(NetConfig cfg, Executor executor);

    Digest submit_tx(VerifyTx tx, std::uint32_t at_node);
    void silence_node(std::uint32_t node);

    // One propose/verify-vote/commit round; returns true if a block committed.
    bool consensus_round();
    // Rounds until no honest mempool has pending txs (bounded by n per tx batch).
    void run_to_quiescence();

    std::optional<Verdict> query_verdict(const Digest& tx_id, std::uint32_t at_node) const;

    double now() const { return clock_; }
    double last_commit_time() const { return last_commit_time_; }
    const std::vector<NodeState>& nodes() const { return nodes_; }
    bool ledgers_prefix_consistent() const;
    void export_ledger_jsonl(std::ostream& out, std::uint32_t node) const;

private:
    double message_latency(std::size_t bytes) const;
    std::uint32_t ring_hops(std::uint32_t a, std::uint32_t b) const;
    bool is_silent(std::uint32_t node) const { return silent_.count(node) > 0; }

    NetConfig cfg_;
    Executor executor_;
    std::vector<NodeState> nodes_;
    std::set<std::uint32_t> silent_;
    std::set<std::array<std::uint8_t, 32>> known_ids_;
    // gossip arrival time of each tx at each node
    std::map<std::pair<std::uint32_t, Digest>, double> arrival_;
    double clock_ = 0.0;
    double last_commit_time_ = 0.0;
    std::uint64_t next_height_ = 0;
    std::uint64_t round_counter_ = 0;
};

// Fresh crash-free simulation with n nodes; one synthetic tx of the given
// payload size; returns simulated ms from submission to commit at all nodes.
double measure_consensus(const NetConfig& cfg, std::uint64_t payload_bytes);

}  // namespace ssc::chain
