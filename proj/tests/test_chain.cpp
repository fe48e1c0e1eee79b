#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "ssc/chain.hpp"
#include "ssc/circuit.hpp"
#include "ssc/defense.hpp"
#include "ssc/proof.hpp"

using namespace ssc;

namespace {

// Real verification pipeline used as the on-chain contract in these tests.
struct ProofFixture {
    circuit::R1CSSystem sys;
    proof::Crs crs;
    std::vector<std::uint8_t> statement_bytes;
    std::vector<std::uint8_t> proof_bytes;

    static ProofFixture make() {
        ProofFixture f;
        f.sys = circuit::extract_circuit(defense::TransformSpec{1, 2}, 4, 4, 3, 8);
        f.crs = proof::keygen(proof::SecurityParam{}, f.sys);
        SplitMix64 rng(1);
        const auto [st, wit] = circuit::gen_witness(f.sys, testutil::random_tensor(rng, 4, 4, 3));
        f.statement_bytes = st.serialize();
        f.proof_bytes = proof::prove(f.sys, f.crs.ek, st, wit, 77).serialize();
        return f;
    }

    chain::Executor executor() const {
        return [this](const chain::VerifyTx& tx) {
            return proof::verify_bytes(sys, crs.vk, tx.statement_bytes, tx.proof_bytes).accepted
                       ? chain::Verdict::Accept
                       : chain::Verdict::Reject;
        };
    }
};

chain::NetConfig bft4() {
    chain::NetConfig cfg;
    cfg.n = 4;
    cfg.f = 1;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(bft4().validate());
    chain::NetConfig bad = bft4();
    bad.n = 5;  // 5 != 3*1 + 1
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.crash_free = true;  // crash-free relaxes the 3f+1 rule
    CHECK_NOTHROW(bad.validate());
    bad.n = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = bft4();
    bad.latency_base_ms = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(bft4().quorum() == 3);
    chain::NetConfig cf;
    cf.crash_free = true;
    cf.n = 10;
    CHECK(cf.quorum() == 2 * 3 + 1);
}

TEST_CASE("gossip latency oracle: 10 KB payload, farthest node in a 2-node net") {
    chain::NetConfig cfg;
    cfg.n = 2;
    cfg.crash_free = true;
    cfg.latency_base_ms = 1.0;
    cfg.latency_per_kb_ms = 0.1;
    chain::Simulation sim(cfg, chain::rejecting_executor());
    sim.silence_node(0);  // forces node 1, one hop away, to lead and commit alone
    sim.submit_tx(chain::VerifyTx::make({}, std::vector<std::uint8_t>(10 * 1024, 7), 0), 0);
    CHECK_FALSE(sim.consensus_round());  // round 0: silent leader aborts
    CHECK(sim.consensus_round());
    // commit time == the tx's gossip arrival at node 1: base + 10 * per_kb
    CHECK(sim.last_commit_time() == doctest::Approx(1.0 + 10 * 0.1).epsilon(1e-12));
}

TEST_CASE("honest proof commits at 4 nodes with 4 votes, verdict accept") {
    const auto f = ProofFixture::make();
    chain::Simulation sim(bft4(), f.executor());
    const Digest id = sim.submit_tx(chain::VerifyTx::make(f.statement_bytes, f.proof_bytes, 0), 0);
    CHECK(sim.query_verdict(id, 2) == std::nullopt);  // not yet committed
    sim.run_to_quiescence();
    for (std::uint32_t node = 0; node < 4; ++node) {
        REQUIRE(sim.nodes()[node].ledger.size() == 1);
        CHECK(sim.nodes()[node].ledger[0].votes.size() == 4);
        const auto verdict = sim.query_verdict(id, node);
        REQUIRE(verdict.has_value());
        CHECK(*verdict == chain::Verdict::Accept);
    }
    CHECK(sim.ledgers_prefix_consistent());
}

TEST_CASE("tampered proof still commits, with a reject verdict") {
    auto f = ProofFixture::make();
    f.proof_bytes[f.proof_bytes.size() / 2] ^= 0xFF;
    chain::Simulation sim(bft4(), f.executor());
    const Digest id = sim.submit_tx(chain::VerifyTx::make(f.statement_bytes, f.proof_bytes, 1), 1);
    sim.run_to_quiescence();
    const auto verdict = sim.query_verdict(id, 3);
    REQUIRE(verdict.has_value());
    CHECK(*verdict == chain::Verdict::Reject);
}

TEST_CASE("each tx appears exactly once in every honest ledger") {
    chain::Simulation sim(bft4(), chain::rejecting_executor());
    std::vector<Digest> ids;
    for (std::uint8_t k = 0; k < 3; ++k)
        ids.push_back(sim.submit_tx(chain::VerifyTx::make({k}, {k, k}, k), k));
    sim.run_to_quiescence();
    for (std::uint32_t node = 0; node < 4; ++node)
        for (const Digest& id : ids) {
            int count = 0;
            for (const auto& b : sim.nodes()[node].ledger)
                for (const auto& tx : b.txs)
                    if (tx.id == id) ++count;
            CHECK(count == 1);
        }
}

TEST_CASE("duplicate submissions are rejected; unknown ids query as not-found") {
    chain::Simulation sim(bft4(), chain::rejecting_executor());
    sim.submit_tx(chain::VerifyTx::make({1, 2, 3}, {4}, 0), 0);
    CHECK_THROWS_AS(sim.submit_tx(chain::VerifyTx::make({1, 2, 3}, {4}, 2), 2),
                    DuplicateTxError);
    CHECK(sim.query_verdict(Digest{}, 0) == std::nullopt);
    CHECK_THROWS_AS(sim.query_verdict(Digest{}, 9), ConfigError);
    CHECK_THROWS_AS(sim.submit_tx(chain::VerifyTx::make({9}, {9}, 0), 9), ConfigError);
}

TEST_CASE("one silent node out of four: commit with 3 = 2f + 1 votes") {
    chain::Simulation sim(bft4(), chain::rejecting_executor());
    sim.silence_node(3);
    sim.submit_tx(chain::VerifyTx::make({1}, {1}, 0), 0);
    sim.run_to_quiescence();
    for (std::uint32_t node = 0; node < 3; ++node) {
        REQUIRE(sim.nodes()[node].ledger.size() == 1);
        CHECK(sim.nodes()[node].ledger[0].votes.size() == 3);
    }
    CHECK(sim.nodes()[3].ledger.empty());
    CHECK(sim.ledgers_prefix_consistent());
}

TEST_CASE("a silent leader aborts its round; liveness holds within n rounds") {
    chain::Simulation sim(bft4(), chain::rejecting_executor());
    sim.silence_node(0);
    const Digest id = sim.submit_tx(chain::VerifyTx::make({5}, {5}, 1), 1);
    CHECK_FALSE(sim.consensus_round());  // leader 0 is silent
    bool committed = false;
    for (std::uint32_t round = 1; round < 4 && !committed; ++round)
        committed = sim.consensus_round();
    CHECK(committed);
    CHECK(sim.query_verdict(id, 1).has_value());
}

TEST_CASE("identical configs replay to byte-identical ledgers") {
    auto run = [] {
        chain::Simulation sim(bft4(), chain::rejecting_executor());
        for (std::uint8_t k = 0; k < 4; ++k)
            sim.submit_tx(chain::VerifyTx::make({k}, std::vector<std::uint8_t>(100 + k, k), k), k);
        sim.run_to_quiescence();
        std::ostringstream out;
        for (std::uint32_t node = 0; node < 4; ++node) sim.export_ledger_jsonl(out, node);
        return std::make_pair(out.str(), sim.last_commit_time());
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK_FALSE(a.first.empty());
}

TEST_CASE("ledger JSONL carries height, proposer, votes and per-tx verdicts") {
    chain::Simulation sim(bft4(), chain::rejecting_executor());
    sim.submit_tx(chain::VerifyTx::make({1}, {2}, 0), 0);
    sim.run_to_quiescence();
    std::ostringstream out;
    sim.export_ledger_jsonl(out, 0);
    const std::string line = out.str();
    CHECK(line.find("\"height\":0") != std::string::npos);
    CHECK(line.find("\"proposer\"") != std::string::npos);
    CHECK(line.find("\"votes\"") != std::string::npos);
    CHECK(line.find("\"verdict\":\"reject\"") != std::string::npos);
}

TEST_CASE("measure_consensus: zero latency costs zero simulated time") {
    chain::NetConfig cfg;
    cfg.n = 5;
    cfg.crash_free = true;
    cfg.latency_base_ms = 0.0;
    cfg.latency_per_kb_ms = 0.0;
    CHECK(chain::measure_consensus(cfg, 10 * 1024) == 0.0);
}

TEST_CASE("measure_consensus: monotone in payload and node count") {
    chain::NetConfig cfg;
    cfg.n = 5;
    cfg.crash_free = true;
    const double t10 = chain::measure_consensus(cfg, 10 * 1024);
    const double t275 = chain::measure_consensus(cfg, 275 * 1024);
    const double t467 = chain::measure_consensus(cfg, 467 * 1024);
    CHECK(t10 > 0.0);
    CHECK(t10 < t275);
    CHECK(t275 < t467);
    chain::NetConfig big = cfg;
    big.n = 50;
    CHECK(chain::measure_consensus(big, 10 * 1024) > t10);
    CHECK_THROWS_AS(chain::measure_consensus(cfg, 0), ConfigError);
}

TEST_CASE("safety holds across 100 seeded runs, including one-silent at n = 4") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(seed);
        chain::NetConfig cfg = bft4();
        cfg.seed = seed;
        cfg.latency_base_ms = rng.next_uniform(0.1, 2.0);
        cfg.latency_per_kb_ms = rng.next_uniform(0.01, 0.5);
        chain::Simulation sim(cfg, chain::rejecting_executor());
        if (seed % 2 == 0) sim.silence_node(static_cast<std::uint32_t>(rng.next_below(4)));
        const int n_tx = 1 + static_cast<int>(rng.next_below(4));
        for (int k = 0; k < n_tx; ++k) {
            const std::uint8_t tag = static_cast<std::uint8_t>(seed * 8 + k);
            sim.submit_tx(chain::VerifyTx::make({tag}, {tag, tag},
                                                static_cast<std::uint32_t>(k % 4)),
                          static_cast<std::uint32_t>(rng.next_below(4)));
        }
        sim.run_to_quiescence();
        CHECK(sim.ledgers_prefix_consistent());
    }
}
