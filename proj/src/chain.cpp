#include "ssc/chain.hpp"

#include <algorithm>
#include <string>

#include "ssc/bytes.hpp"
#include "ssc/errors.hpp"

#include <json.hpp>

namespace ssc::chain {

namespace {
constexpr std::size_t kVoteBytes = 128;
constexpr std::size_t kCommitBytes = 160;
constexpr std::size_t kBlockHeaderBytes = 256;
constexpr std::size_t kTxOverheadBytes = 128;
}  // namespace

VerifyTx VerifyTx::make(std::vector<std::uint8_t> statement_bytes,
                        std::vector<std::uint8_t> proof_bytes, std::uint32_t submitter) {
    VerifyTx tx;
    tx.id = HashInput().bytes(statement_bytes).bytes(proof_bytes).digest();
    tx.statement_bytes = std::move(statement_bytes);
    tx.proof_bytes = std::move(proof_bytes);
    tx.submitter = submitter;
    return tx;
}

Digest Block::hash() const {
    HashInput h;
    h.str("blk:").u64(height).bytes(prev_hash).u32(proposer);
    h.u64(txs.size());
    for (const VerifyTx& tx : txs) {
        h.bytes(tx.id);
        h.u32(tx.verdict && *tx.verdict == Verdict::Accept ? 1 : 0);
    }
    h.u64(votes.size());
    for (std::uint32_t v : votes) h.u32(v);
    return h.digest();
}

void NetConfig::validate() const {
    if (n < 1) throw ConfigError("node count must be >= 1");
    if (!crash_free && n != 3 * f + 1)
        throw ConfigError("n = 3f + 1 required outside crash-free mode (n=" + std::to_string(n) +
                          ", f=" + std::to_string(f) + ")");
    if (latency_base_ms < 0.0 || latency_per_kb_ms < 0.0)
        throw ConfigError("latencies must be >= 0");
}

Executor rejecting_executor() {
    return [](const VerifyTx&) { return Verdict::Reject; };
}

Simulation::Simulation(NetConfig cfg, Executor executor)
    : cfg_(cfg), executor_(std::move(executor)) {
    cfg_.validate();
    nodes_.resize(cfg_.n);
    for (std::uint32_t i = 0; i < cfg_.n; ++i) nodes_[i].id = i;
}

double Simulation::message_latency(std::size_t bytes) const {
    return cfg_.latency_base_ms + cfg_.latency_per_kb_ms * (static_cast<double>(bytes) / 1024.0);
}

std::uint32_t Simulation::ring_hops(std::uint32_t a, std::uint32_t b) const {
    const std::uint32_t d = a > b ? a - b : b - a;
    return std::min(d, cfg_.n - d);
}

Digest Simulation::submit_tx(VerifyTx tx, std::uint32_t at_node) {
    if (at_node >= cfg_.n) throw ConfigError("no such node: " + std::to_string(at_node));
    if (!known_ids_.insert(tx.id).second)
        throw DuplicateTxError("transaction already submitted: " + hex(tx.id));
    const Digest id = tx.id;
    const double lat = message_latency(tx.payload_bytes());
    // gossip: hop-by-hop flood over the ring
    for (std::uint32_t j = 0; j < cfg_.n; ++j) {
        arrival_[{j, id}] = clock_ + ring_hops(at_node, j) * lat;
        nodes_[j].mempool.push_back(tx);
    }
    return id;
}

void Simulation::silence_node(std::uint32_t node) {
    if (node >= cfg_.n) throw ConfigError("no such node: " + std::to_string(node));
    silent_.insert(node);
}

bool Simulation::consensus_round() {
    const std::uint32_t leader = static_cast<std::uint32_t>(round_counter_++ % cfg_.n);
    if (is_silent(leader)) return false;

    NodeState& ln = nodes_[leader];
    if (ln.mempool.empty()) return false;

    // The round starts once every included tx has gossiped to the leader.
    double t_start = clock_;
    for (const VerifyTx& tx : ln.mempool)
        t_start = std::max(t_start, arrival_.at({leader, tx.id}));

    Block block;
    block.height = next_height_;
    block.prev_hash = ln.ledger.empty() ? Digest{} : ln.ledger.back().hash();
    block.proposer = leader;
    block.txs = ln.mempool;
    std::size_t block_bytes = kBlockHeaderBytes;
    for (VerifyTx& tx : block.txs) {
        tx.verdict = executor_(tx);  // contract execution, deterministic
        block_bytes += tx.payload_bytes() + kTxOverheadBytes;
    }

    // proposal out, verify + vote back, ordered by arrival at the leader
    std::vector<std::pair<double, std::uint32_t>> votes;
    votes.push_back({t_start, leader});
    for (std::uint32_t j = 0; j < cfg_.n; ++j) {
        if (j == leader || is_silent(j)) continue;
        const double t_prop = t_start + ring_hops(leader, j) * message_latency(block_bytes);
        bool match = true;  // re-execute and compare verdicts
        for (const VerifyTx& tx : block.txs)
            if (executor_(tx) != *tx.verdict) match = false;
        if (!match) continue;
        votes.push_back({t_prop + ring_hops(j, leader) * message_latency(kVoteBytes), j});
    }
    std::sort(votes.begin(), votes.end());
    if (votes.size() < cfg_.quorum()) return false;  // no quorum; txs stay pending

    const double t_commit = votes[cfg_.quorum() - 1].first;
    for (const auto& [t, node] : votes) block.votes.push_back(node);
    std::sort(block.votes.begin(), block.votes.end());

    double t_final = t_commit;
    for (std::uint32_t j = 0; j < cfg_.n; ++j) {
        if (is_silent(j)) continue;
        const double t_fin = t_commit + ring_hops(leader, j) * message_latency(kCommitBytes);
        t_final = std::max(t_final, t_fin);
        nodes_[j].ledger.push_back(block);
    }
    ++next_height_;
    last_commit_time_ = t_final;
    clock_ = t_final;

    // committed txs leave every mempool
    for (NodeState& node : nodes_) {
        std::erase_if(node.mempool, [&](const VerifyTx& tx) {
            return std::any_of(block.txs.begin(), block.txs.end(),
                               [&](const VerifyTx& b) { return b.id == tx.id; });
        });
    }
    return true;
}

void Simulation::run_to_quiescence() {
    std::uint64_t idle_rounds = 0;
    while (idle_rounds <= cfg_.n) {
        bool pending = false;
        for (std::uint32_t j = 0; j < cfg_.n; ++j)
            if (!is_silent(j) && !nodes_[j].mempool.empty()) pending = true;
        if (!pending) return;
        idle_rounds = consensus_round() ? 0 : idle_rounds + 1;
    }
}

std::optional<Verdict> Simulation::query_verdict(const Digest& tx_id, std::uint32_t at_node) const {
    if (at_node >= cfg_.n) throw ConfigError("no such node: " + std::to_string(at_node));
    for (const Block& b : nodes_[at_node].ledger)
        for (const VerifyTx& tx : b.txs)
            if (tx.id == tx_id) return tx.verdict;
    return std::nullopt;
}

bool Simulation::ledgers_prefix_consistent() const {
    for (std::uint32_t a = 0; a < cfg_.n; ++a) {
        if (is_silent(a)) continue;
        for (std::uint32_t b = a + 1; b < cfg_.n; ++b) {
            if (is_silent(b)) continue;
            const auto& la = nodes_[a].ledger;
            const auto& lb = nodes_[b].ledger;
            const std::size_t common = std::min(la.size(), lb.size());
            for (std::size_t h = 0; h < common; ++h)
                if (!(la[h].hash() == lb[h].hash())) return false;
        }
    }
    return true;
}

void Simulation::export_ledger_jsonl(std::ostream& out, std::uint32_t node) const {
    if (node >= cfg_.n) throw ConfigError("no such node: " + std::to_string(node));
    for (const Block& b : nodes_[node].ledger) {
        nlohmann::json j;
        j["height"] = b.height;
        j["prev_hash"] = hex(b.prev_hash);
        j["proposer"] = b.proposer;
        j["votes"] = b.votes;
        auto& txs = j["txs"] = nlohmann::json::array();
        for (const VerifyTx& tx : b.txs)
            txs.push_back({{"id", hex(tx.id)},
                           {"verdict", tx.verdict && *tx.verdict == Verdict::Accept ? "accept" : "reject"},
                           {"bytes", tx.payload_bytes()}});
        out << j.dump() << "\n";
    }
}

double measure_consensus(const NetConfig& cfg, std::uint64_t payload_bytes) {
    if (payload_bytes < 1) throw ConfigError("payload must be >= 1 byte");
    NetConfig c = cfg;
    c.crash_free = true;
    Simulation sim(c, rejecting_executor());
    VerifyTx tx = VerifyTx::make({}, std::vector<std::uint8_t>(payload_bytes, 0), 0);
    sim.submit_tx(std::move(tx), 0);
    sim.run_to_quiescence();
    return sim.last_commit_time();
}

}  // namespace ssc::chain
