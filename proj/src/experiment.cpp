#include "ssc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssc/attack.hpp"
#include "ssc/circuit.hpp"
#include "ssc/defense.hpp"
#include "ssc/errors.hpp"
#include "ssc/ppm.hpp"
#include "ssc/procedural.hpp"
#include "ssc/proof.hpp"
#include "ssc/rng.hpp"

namespace fs = std::filesystem;

namespace ssc::experiment {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("seeds must be non-empty");
    if (image_size < 8) throw ConfigError("image_size must be >= 8");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (eta <= 0.0) throw ConfigError("eta must be > 0");
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (defense_scale <= 0.0 || defense_scale > 1.0)
        throw ConfigError("defense scale must be in (0, 1]");
    if (defense_threshold <= 0.0) throw ConfigError("defense threshold must be > 0");
    if (frac_bits < 1 || frac_bits > 10) throw ConfigError("frac_bits must be in [1, 10]");
    if (proof_image_size < 2 || proof_image_size > 16)
        throw ConfigError("proof_image_size must be in [2, 16]");
    if (descriptor_dim < 1) throw ConfigError("descriptor_dim must be >= 1");
    if (shared_resolution < 8) throw ConfigError("shared_resolution must be >= 8");
    if (out_dir.empty()) throw ConfigError("out_dir must be set");
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "seeds") {
            cfg.seeds.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) cfg.seeds.push_back(std::stoull(tok));
        } else if (key == "image_size") {
            cfg.image_size = std::stoul(value);
        } else if (key == "iterations") {
            cfg.iterations = std::stoi(value);
        } else if (key == "eta") {
            cfg.eta = std::stod(value);
        } else if (key == "lambda") {
            cfg.lambda = std::stod(value);
        } else if (key == "scale") {
            cfg.defense_scale = std::stod(value);
        } else if (key == "threshold") {
            cfg.defense_threshold = std::stod(value);
        } else if (key == "frac_bits") {
            cfg.frac_bits = static_cast<std::uint32_t>(std::stoul(value));
        } else if (key == "lambda_sec") {
            cfg.lambda_sec = static_cast<std::uint32_t>(std::stoul(value));
        } else if (key == "proof_image_size") {
            cfg.proof_image_size = std::stoul(value);
        } else if (key == "net_seed") {
            cfg.net_seed = std::stoull(value);
        } else if (key == "descriptor_dim") {
            cfg.descriptor_dim = std::stoi(value);
        } else if (key == "shared_resolution") {
            cfg.shared_resolution = std::stoi(value);
        } else if (key == "latency_base_ms") {
            cfg.chain_base.latency_base_ms = std::stod(value);
        } else if (key == "latency_per_kb_ms") {
            cfg.chain_base.latency_per_kb_ms = std::stod(value);
        } else if (key == "chain_seed") {
            cfg.chain_base.seed = std::stoull(value);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("value out of range for " + key + ": " + value);
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line missing '=': " + line);
        auto trim = [](std::string s) {
            const std::size_t a = s.find_first_not_of(" \t\r");
            const std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

namespace {

// Writes to <name>.partial and renames into place on commit, so interrupted
// stages leave their partial output visible.
class StagedFile {
public:
    explicit StagedFile(const fs::path& final_path)
        : final_(final_path), tmp_(final_path.string() + ".partial"), out_(tmp_, std::ios::binary) {
        if (!out_) throw ConfigError("cannot write " + tmp_.string());
    }
    std::ostream& stream() { return out_; }
    void commit() {
        out_.close();
        if (!out_) throw ConfigError("write failed: " + tmp_.string());
        fs::rename(tmp_, final_);
    }

private:
    fs::path final_, tmp_;
    std::ofstream out_;
};

double l2_distance(const Tensor& a, const Tensor& b) {
    if (a.size() != b.size()) throw DimensionError("l2 over mismatched tensors");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Tensor noisy_copy(const Tensor& img, std::uint64_t seed, double amplitude) {
    Tensor out = img;
    SplitMix64 rng(seed);
    for (double& v : out.data()) {
        v += rng.next_uniform(-amplitude, amplitude);
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

// First iteration whose total loss is within 10% (of the total decrease) of the
// final value; the convergence-speed proxy used for the ordering check.
int convergence_iteration(const attack::AttackTrace& trace) {
    const double init = trace.rows.front().total;
    const double fin = trace.rows.back().total;
    const double thresh = fin + 0.1 * (init - fin);
    for (const attack::TraceRow& r : trace.rows)
        if (r.total <= thresh) return r.iter;
    return trace.rows.back().iter;
}

struct Cell {
    attack::LossKind kind;
    std::uint64_t seed;
    Tensor target, carrier, adv;
    attack::AttackTrace trace;
};

}  // namespace

SuiteResult run_experiment_suite(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);

    const desc::DescriptorNetwork net =
        desc::DescriptorNetwork::make(cfg.net_seed, cfg.descriptor_dim);
    const int s = cfg.shared_resolution;
    const defense::TransformSpec spec = defense::TransformSpec::from_scale(cfg.defense_scale);
    nlohmann::ordered_json summary;
    nlohmann::ordered_json checks;

    // ---- attack cells: one optimization run per (loss kind, seed) ----
    const attack::LossKind kinds[] = {attack::LossKind::Global, attack::LossKind::Tensor,
                                      attack::LossKind::Hist};
    std::vector<Cell> cells;
    for (attack::LossKind kind : kinds) {
        for (std::uint64_t seed : cfg.seeds) {
            Cell cell;
            cell.kind = kind;
            cell.seed = seed;
            // same procedural kind per pair: the disguise should be plausible
            const auto img_kind = static_cast<procedural::Kind>(seed % 3);
            cell.target = procedural::generate(img_kind, 2 * seed + 1, cfg.image_size);
            cell.carrier = procedural::generate(img_kind, 2 * seed, cfg.image_size);
            attack::AttackConfig acfg;
            acfg.loss_kind = kind;
            acfg.lambda = cfg.lambda;
            acfg.eta = cfg.eta;
            acfg.iterations = cfg.iterations;
            acfg.s = s;
            attack::AttackInstance inst{cell.target, cell.carrier, "target", "carrier"};
            auto [adv, trace] = attack::run_attack(net, inst, acfg);
            cell.adv = std::move(adv);
            cell.trace = std::move(trace);
            cells.push_back(std::move(cell));
        }
    }

    {
        StagedFile f(dir / "loss_curves.csv");
        f.stream() << "loss,seed,iter,total,perf,distortion,sim_target,sim_carrier\n";
        for (const Cell& c : cells)
            for (const attack::TraceRow& r : c.trace.rows)
                f.stream() << attack::loss_kind_name(c.kind) << "," << c.seed << "," << r.iter
                           << "," << format_double(r.total) << "," << format_double(r.perf) << ","
                           << format_double(r.distortion) << "," << format_double(r.sim_target)
                           << "," << format_double(r.sim_carrier) << "\n";
        f.commit();
    }

    // ---- attack efficacy table ----
    std::vector<double> conv_iters[3];
    std::vector<double> final_sims[3], l2_ratios[3];
    {
        StagedFile f(dir / "similarity_attack.csv");
        f.stream() << "loss,seed,sim_adv_target,sim_carrier_target,l2_adv_target,"
                      "l2_carrier_target\n";
        for (const Cell& c : cells) {
            const double sim_at = c.trace.rows.back().sim_target;
            const double sim_ct = desc::similarity(desc::extract_descriptor(net, c.carrier, s),
                                                   desc::extract_descriptor(net, c.target, s));
            const double l2_at = l2_distance(c.adv, c.target);
            const double l2_ct = l2_distance(c.carrier, c.target);
            f.stream() << attack::loss_kind_name(c.kind) << "," << c.seed << ","
                       << format_double(sim_at) << "," << format_double(sim_ct) << ","
                       << format_double(l2_at) << "," << format_double(l2_ct) << "\n";
            const int k = static_cast<int>(c.kind);
            final_sims[k].push_back(sim_at);
            l2_ratios[k].push_back(l2_ct > 0.0 ? l2_at / l2_ct : 0.0);
            conv_iters[k].push_back(convergence_iteration(c.trace));
        }
        f.commit();
    }
    {
        bool efficacy = true;
        nlohmann::ordered_json by_loss;
        for (attack::LossKind kind : kinds) {
            const int k = static_cast<int>(kind);
            const double med_sim = median(final_sims[k]);
            const double med_ratio = median(l2_ratios[k]);
            by_loss[attack::loss_kind_name(kind)] = {{"median_sim_target", med_sim},
                                                     {"median_l2_ratio", med_ratio}};
            efficacy = efficacy && med_sim >= 0.90 && med_ratio >= 0.5;
        }
        checks["attack_efficacy"] = {{"pass", efficacy}, {"by_loss", by_loss}};
        const double mg = median(conv_iters[static_cast<int>(attack::LossKind::Global)]);
        const double mt = median(conv_iters[static_cast<int>(attack::LossKind::Tensor)]);
        const double mh = median(conv_iters[static_cast<int>(attack::LossKind::Hist)]);
        checks["convergence_ordering"] = {{"pass", mg < mt && mh < mt},
                                          {"median_iter_global", mg},
                                          {"median_iter_tensor", mt},
                                          {"median_iter_hist", mh}};
    }

    // ---- defense table: similarity drops for adversarial vs. authentic pairs ----
    {
        StagedFile f(dir / "similarity_defense.csv");
        f.stream() << "loss,seed,pair,sim_before,sim_after,drop,flagged\n";
        std::vector<double> adv_drop[3], carrier_drop[3], auth_drop[3];
        for (const Cell& c : cells) {
            struct PairCase {
                const char* name;
                const Tensor* cand;
                const Tensor* ref;
            };
            const Tensor authentic = noisy_copy(c.target, c.seed ^ 0xA07, 0.02);
            const PairCase pairs[] = {{"adversarial_vs_target", &c.adv, &c.target},
                                      {"adversarial_vs_carrier", &c.adv, &c.carrier},
                                      {"authentic", &authentic, &c.target}};
            for (const PairCase& p : pairs) {
                const defense::DefenseVerdict v = defense::evaluate_defense(
                    net, *p.cand, *p.ref, spec, cfg.defense_threshold, s);
                f.stream() << attack::loss_kind_name(c.kind) << "," << c.seed << "," << p.name
                           << "," << format_double(v.sim_before) << ","
                           << format_double(v.sim_after) << "," << format_double(v.drop) << ","
                           << (v.flagged ? 1 : 0) << "\n";
                const int k = static_cast<int>(c.kind);
                if (p.name[0] == 'a' && p.name[1] == 'd') {
                    (p.ref == &c.target ? adv_drop[k] : carrier_drop[k]).push_back(v.drop);
                } else {
                    auth_drop[k].push_back(v.drop);
                }
            }
        }
        f.commit();
        bool separated = true;
        nlohmann::ordered_json by_loss;
        for (attack::LossKind kind : kinds) {
            const int k = static_cast<int>(kind);
            const double a = mean(adv_drop[k]), cdrop = mean(carrier_drop[k]),
                         au = mean(auth_drop[k]);
            by_loss[attack::loss_kind_name(kind)] = {{"mean_drop_adversarial", a},
                                                     {"mean_drop_vs_carrier", cdrop},
                                                     {"mean_drop_authentic", au}};
            separated = separated && a >= 2.0 * au && a > cdrop;
        }
        checks["defense_separation"] = {{"pass", separated}, {"by_loss", by_loss}};
    }

    // ---- proof overhead tiers (deterministic hash-op cost model) ----
    struct Tier {
        const char* name;
        std::size_t size;
    };
    const Tier tiers[] = {{"small", cfg.proof_image_size}, {"medium", 12}, {"large", 16}};
    circuit::R1CSSystem pipeline_system;
    proof::Crs pipeline_crs;
    std::vector<std::uint8_t> pipeline_statement, pipeline_proof;
    bool proofs_ok = true, prove_gt_verify = true;
    {
        StagedFile f(dir / "zkp_overhead.csv");
        f.stream() << "tier,op,image_size,constraints,cost_ops,output_bytes\n";
        const proof::SecurityParam sec{cfg.lambda_sec};
        for (const Tier& t : tiers) {
            const circuit::R1CSSystem sys = circuit::extract_circuit(
                spec, static_cast<int>(t.size), static_cast<int>(t.size), 3, cfg.frac_bits);
            const Tensor img = procedural::generate_any(cfg.seeds.front(), t.size);
            const auto [st, wit] = circuit::gen_witness(sys, img);
            const proof::Crs crs = proof::keygen(sec, sys);
            const proof::Proof pf = proof::prove(sys, crs.ek, st, wit, cfg.seeds.front());
            const auto st_bytes = st.serialize();
            const auto pf_bytes = pf.serialize();
            const proof::VerifyResult vr = proof::verify(sys, crs.vk, st, pf);
            proofs_ok = proofs_ok && vr.accepted;
            const std::uint64_t m = sys.constraints.size();
            const std::uint64_t wops = proof::witness_gen_ops(sys);
            const std::uint64_t pops = proof::prove_hash_ops(sys);
            const std::uint64_t vops = proof::verify_hash_ops(sys, pf);
            prove_gt_verify = prove_gt_verify && pops > vops && pops > wops;
            f.stream() << t.name << ",GenWitness," << t.size << "," << m << "," << wops << ","
                       << st_bytes.size() << "\n";
            f.stream() << t.name << ",GenProof," << t.size << "," << m << "," << pops << ","
                       << pf_bytes.size() << "\n";
            f.stream() << t.name << ",VerifyProof," << t.size << "," << m << "," << vops << ",0\n";
            if (t.size == cfg.proof_image_size) {
                pipeline_system = sys;
                pipeline_crs = crs;
                pipeline_statement = st_bytes;
                pipeline_proof = pf_bytes;
            }
        }
        f.commit();
    }
    checks["proof_completeness"] = {{"pass", proofs_ok}};
    checks["prove_dominates"] = {{"pass", prove_gt_verify}};

    // ---- consensus overhead grid: committee size x payload size ----
    {
        StagedFile f(dir / "consensus_overhead.csv");
        f.stream() << "nodes,payload_bytes,elapsed_ms,committed\n";
        const std::uint32_t node_counts[] = {5, 10, 20, 50};
        const std::uint64_t payloads[] = {10 * 1024, 275 * 1024, 467 * 1024};
        bool monotonic = true;
        double prev_by_nodes = -1.0;
        for (std::uint32_t n : node_counts) {
            double prev_by_payload = -1.0;
            for (std::uint64_t p : payloads) {
                chain::NetConfig nc = cfg.chain_base;
                nc.n = n;
                nc.crash_free = true;
                const double ms = chain::measure_consensus(nc, p);
                f.stream() << n << "," << p << "," << format_double(ms) << ",1\n";
                if (prev_by_payload >= 0.0 && ms <= prev_by_payload) monotonic = false;
                prev_by_payload = ms;
                if (n == node_counts[0] && p == payloads[0]) prev_by_nodes = ms;
            }
            if (n != node_counts[0]) {
                chain::NetConfig nc = cfg.chain_base;
                nc.n = n;
                nc.crash_free = true;
                const double ms = chain::measure_consensus(nc, payloads[0]);
                if (ms <= prev_by_nodes) monotonic = false;
                prev_by_nodes = ms;
            }
        }
        f.commit();
        checks["consensus_trends"] = {{"pass", monotonic}};
    }

    // ---- end-to-end ledger round trip: the real verifier as the contract ----
    {
        chain::NetConfig nc = cfg.chain_base;
        nc.n = 4;
        nc.f = 1;
        chain::Executor contract = [&](const chain::VerifyTx& tx) {
            const proof::VerifyResult r =
                proof::verify_bytes(pipeline_system, pipeline_crs.vk, tx.statement_bytes,
                                    tx.proof_bytes);
            return r.accepted ? chain::Verdict::Accept : chain::Verdict::Reject;
        };
        chain::Simulation sim(nc, contract);
        const Digest honest_id =
            sim.submit_tx(chain::VerifyTx::make(pipeline_statement, pipeline_proof, 0), 0);
        std::vector<std::uint8_t> bad_proof = pipeline_proof;
        bad_proof[bad_proof.size() / 2] ^= 0x01;
        const Digest bad_id =
            sim.submit_tx(chain::VerifyTx::make(pipeline_statement, bad_proof, 1), 1);
        sim.run_to_quiescence();
        const auto honest = sim.query_verdict(honest_id, 2);
        const auto bad = sim.query_verdict(bad_id, 3);
        const bool ok = honest && *honest == chain::Verdict::Accept && bad &&
                        *bad == chain::Verdict::Reject && sim.ledgers_prefix_consistent();
        checks["pipeline_ledger"] = {{"pass", ok},
                                     {"honest_tx", hex(honest_id)},
                                     {"tampered_tx", hex(bad_id)}};
        std::ofstream ledger(dir / "ledger.jsonl", std::ios::binary);
        sim.export_ledger_jsonl(ledger, 0);
    }

    // ---- sample artifacts + image round trip ----
    {
        const fs::path sample = dir / "sample_adversarial.ppm";
        ppm::save(cells.front().adv, sample.string());
        const Tensor back = ppm::load(sample.string());
        double max_err = 0.0;
        for (std::size_t i = 0; i < back.size(); ++i)
            max_err = std::max(max_err, std::abs(back.data()[i] - cells.front().adv.data()[i]));
        checks["image_roundtrip"] = {{"pass", max_err <= 1.0 / 510.0 + 1e-12},
                                     {"max_quantization_error", max_err}};
    }

    bool all = true;
    for (const auto& [name, c] : checks.items()) all = all && c.at("pass").get<bool>();
    summary["all_passed"] = all;
    summary["checks"] = checks;
    summary["config"] = {{"seeds", cfg.seeds},
                         {"image_size", cfg.image_size},
                         {"iterations", cfg.iterations},
                         {"eta", cfg.eta},
                         {"lambda", cfg.lambda},
                         {"scale", cfg.defense_scale},
                         {"threshold", cfg.defense_threshold},
                         {"frac_bits", cfg.frac_bits},
                         {"lambda_sec", cfg.lambda_sec},
                         {"proof_image_size", cfg.proof_image_size},
                         {"net_seed", cfg.net_seed}};
    summary["ops_exercised"] = {
        "generate",        "run_attack",     "total_loss",       "adam_step",
        "extract_descriptor", "similarity",  "extract_activations",
        "defend_transform", "evaluate_defense", "extract_circuit", "gen_witness",
        "keygen",          "prove",          "verify",           "verify_bytes",
        "serialize",       "deserialize",    "submit_tx",        "consensus_round",
        "run_to_quiescence", "query_verdict", "export_ledger_jsonl",
        "measure_consensus", "save_ppm",     "load_ppm"};

    const fs::path summary_path = dir / "summary.json";
    {
        StagedFile f(summary_path);
        f.stream() << summary.dump(2) << "\n";
        f.commit();
    }
    return {all, summary_path.string()};
}

}  // namespace ssc::experiment
