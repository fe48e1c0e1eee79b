// Command-line front end: attack, defend, descriptor, prove, verify,
// chain-sim, experiment.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssc/attack.hpp"
#include "ssc/chain.hpp"
#include "ssc/circuit.hpp"
#include "ssc/defense.hpp"
#include "ssc/descriptor.hpp"
#include "ssc/errors.hpp"
#include "ssc/experiment.hpp"
#include "ssc/ppm.hpp"
#include "ssc/procedural.hpp"
#include "ssc/proof.hpp"

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ssc::ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string s = buf.str();
    return {s.begin(), s.end()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ssc::ConfigError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ssc::ConfigError("write failed: " + path);
}

const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const ssc::ParseError*>(&e)) return "parse";
    if (dynamic_cast<const ssc::ConfigError*>(&e)) return "config";
    if (dynamic_cast<const ssc::CircuitError*>(&e)) return "circuit";
    if (dynamic_cast<const ssc::DimensionError*>(&e)) return "dimension";
    if (dynamic_cast<const ssc::NumericError*>(&e)) return "numeric";
    if (dynamic_cast<const ssc::DuplicateTxError*>(&e)) return "duplicate_tx";
    return "error";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic-attack / defense / verifiable-transform toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand too
    bool json_errors = false;
    app.add_flag("--json-errors", json_errors, "emit errors as JSON on stderr");

    std::uint64_t net_seed = 42;
    int dim = 32, shared = 32;
    app.add_option("--net-seed", net_seed, "descriptor network seed")->capture_default_str();
    app.add_option("--dim", dim, "descriptor dimension")->capture_default_str();
    app.add_option("--s", shared, "shared attack resolution")->capture_default_str();

    // attack
    auto* atk = app.add_subcommand("attack", "craft an adversarial image");
    std::string atk_target, atk_carrier, atk_out, atk_trace, atk_loss = "global";
    ssc::attack::AttackConfig acfg;
    atk->add_option("--target", atk_target, "target image (P6 PPM)")->required();
    atk->add_option("--carrier", atk_carrier, "carrier image (P6 PPM)")->required();
    atk->add_option("--loss", atk_loss, "loss kind: global|tensor|hist")->capture_default_str();
    atk->add_option("--iters", acfg.iterations, "optimizer iterations")->capture_default_str();
    atk->add_option("--lr", acfg.eta, "learning rate")->capture_default_str();
    atk->add_option("--lambda", acfg.lambda, "distortion weight")->capture_default_str();
    atk->add_option("--out", atk_out, "output adversarial image")->required();
    atk->add_option("--trace", atk_trace, "per-iteration CSV trace");

    // defend
    auto* dfd = app.add_subcommand("defend", "apply the blur transform and compare descriptors");
    std::string dfd_candidate, dfd_reference, dfd_out;
    double dfd_scale = 0.5, dfd_threshold = 0.05;
    dfd->add_option("--candidate", dfd_candidate, "image under test")->required();
    dfd->add_option("--reference", dfd_reference, "trusted reference image")->required();
    dfd->add_option("--scale", dfd_scale, "down-sample factor in (0,1]")->capture_default_str();
    dfd->add_option("--threshold", dfd_threshold, "similarity-drop flag threshold")
        ->capture_default_str();
    dfd->add_option("--out", dfd_out, "write the transformed candidate here");

    // descriptor
    auto* dsc = app.add_subcommand("descriptor", "print an image's unit descriptor");
    std::string dsc_image;
    dsc->add_option("--image", dsc_image, "input image (P6 PPM)")->required();

    // prove
    auto* prv = app.add_subcommand("prove", "prove the blur transform over an image");
    std::string prv_image, prv_statement, prv_proof, prv_vk;
    double prv_scale = 0.5;
    std::uint32_t prv_frac = ssc::circuit::kDefaultFracBits, prv_lambda = 80;
    std::uint64_t prv_salt = 0;
    prv->add_option("--image", prv_image, "input image (P6 PPM, <= 16x16)")->required();
    prv->add_option("--scale", prv_scale, "down-sample factor")->capture_default_str();
    prv->add_option("--frac-bits", prv_frac, "fixed-point fractional bits")->capture_default_str();
    prv->add_option("--lambda-sec", prv_lambda, "spot-check security parameter")
        ->capture_default_str();
    prv->add_option("--salt-seed", prv_salt, "commitment salt seed")->capture_default_str();
    prv->add_option("--statement", prv_statement, "output statement file")->required();
    prv->add_option("--proof", prv_proof, "output proof file")->required();
    prv->add_option("--vk", prv_vk, "output verification key file")->required();

    // verify
    auto* vfy = app.add_subcommand("verify", "check a proof against a statement");
    std::string vfy_vk, vfy_statement, vfy_proof;
    vfy->add_option("--vk", vfy_vk, "verification key file")->required();
    vfy->add_option("--statement", vfy_statement, "statement file")->required();
    vfy->add_option("--proof", vfy_proof, "proof file")->required();

    // chain-sim
    auto* sim = app.add_subcommand("chain-sim", "measure simulated consensus latency");
    std::uint32_t sim_nodes = 5;
    double sim_payload_kb = 10.0, sim_base = 1.0, sim_per_kb = 0.1;
    std::uint64_t sim_seed = 0;
    sim->add_option("--nodes", sim_nodes, "committee size")->capture_default_str();
    sim->add_option("--payload-kb", sim_payload_kb, "transaction payload in KB")
        ->capture_default_str();
    sim->add_option("--seed", sim_seed, "simulation seed")->capture_default_str();
    sim->add_option("--base-ms", sim_base, "per-hop base latency (ms)")->capture_default_str();
    sim->add_option("--per-kb-ms", sim_per_kb, "per-hop latency per KB (ms)")
        ->capture_default_str();

    // experiment
    auto* exp = app.add_subcommand("experiment", "run the full experiment suite");
    std::string exp_config, exp_out;
    std::vector<std::string> exp_set;
    exp->add_option("--config", exp_config, "key=value config file");
    exp->add_option("--out", exp_out, "output directory (overrides config)");
    exp->add_option("--set", exp_set, "extra key=value overrides")->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags -> usage error
    }

    try {
        if (*atk) {
            acfg.loss_kind = ssc::attack::loss_kind_from_name(atk_loss);
            acfg.s = shared;
            acfg.validate();
            const ssc::desc::DescriptorNetwork net =
                ssc::desc::DescriptorNetwork::make(net_seed, dim);
            ssc::attack::AttackInstance inst{ssc::ppm::load(atk_target),
                                             ssc::ppm::load(atk_carrier), atk_target, atk_carrier};
            auto [adv, trace] = ssc::attack::run_attack(net, inst, acfg);
            ssc::ppm::save(adv, atk_out);
            if (!atk_trace.empty()) {
                std::ofstream out(atk_trace, std::ios::binary);
                if (!out) throw ssc::ConfigError("cannot write " + atk_trace);
                trace.write_csv(out);
            }
            const auto& last = trace.rows.back();
            std::cout << "final sim_target=" << ssc::experiment::format_double(last.sim_target)
                      << " total=" << ssc::experiment::format_double(last.total) << "\n";
        } else if (*dfd) {
            const ssc::desc::DescriptorNetwork net =
                ssc::desc::DescriptorNetwork::make(net_seed, dim);
            const ssc::defense::TransformSpec spec =
                ssc::defense::TransformSpec::from_scale(dfd_scale);
            const ssc::Tensor candidate = ssc::ppm::load(dfd_candidate);
            const ssc::Tensor reference = ssc::ppm::load(dfd_reference);
            const ssc::defense::DefenseVerdict v = ssc::defense::evaluate_defense(
                net, candidate, reference, spec, dfd_threshold, shared);
            if (!dfd_out.empty())
                ssc::ppm::save(ssc::defense::defend_transform(candidate, spec), dfd_out);
            std::cout << v.to_json(spec.scale()) << "\n";
            return v.flagged ? 1 : 0;
        } else if (*dsc) {
            const ssc::desc::DescriptorNetwork net =
                ssc::desc::DescriptorNetwork::make(net_seed, dim);
            const ssc::desc::Descriptor d =
                ssc::desc::extract_descriptor(net, ssc::ppm::load(dsc_image), shared);
            for (std::size_t i = 0; i < d.values.size(); ++i)
                std::cout << (i ? "," : "") << ssc::experiment::format_double(d.values[i]);
            std::cout << "\n";
        } else if (*prv) {
            const ssc::Tensor img = ssc::ppm::load(prv_image);
            if (img.width() > 16 || img.height() > 16)
                throw ssc::ConfigError("proof demos are limited to images <= 16x16");
            const ssc::defense::TransformSpec spec =
                ssc::defense::TransformSpec::from_scale(prv_scale);
            const ssc::circuit::R1CSSystem sys =
                ssc::circuit::extract_circuit(spec, img.width(), img.height(), 3, prv_frac);
            const auto [st, wit] = ssc::circuit::gen_witness(sys, img);
            const ssc::proof::Crs crs = ssc::proof::keygen({prv_lambda}, sys);
            const ssc::proof::Proof pf = ssc::proof::prove(sys, crs.ek, st, wit, prv_salt);
            write_file(prv_statement, st.serialize());
            write_file(prv_proof, pf.serialize());
            write_file(prv_vk, crs.serialize_vk());
            std::cout << "constraints=" << sys.constraints.size()
                      << " proof_bytes=" << pf.serialized_size() << "\n";
        } else if (*vfy) {
            const ssc::proof::Crs::Vk vk = ssc::proof::Crs::deserialize_vk(read_file(vfy_vk));
            const std::vector<std::uint8_t> st_bytes = read_file(vfy_statement);
            const ssc::circuit::Statement st = ssc::circuit::Statement::deserialize(st_bytes);
            const ssc::circuit::R1CSSystem sys = ssc::circuit::extract_circuit(
                st.spec, static_cast<int>(st.width), static_cast<int>(st.height),
                static_cast<int>(st.channels), st.frac_bits);
            const ssc::proof::VerifyResult r =
                ssc::proof::verify_bytes(sys, vk, st_bytes, read_file(vfy_proof));
            if (r.accepted) {
                std::cout << "accept\n";
                return 0;
            }
            std::cout << "reject (" << ssc::proof::reject_reason_name(r.reason) << ")\n";
            return 1;
        } else if (*sim) {
            ssc::chain::NetConfig nc;
            nc.n = sim_nodes;
            nc.crash_free = true;
            nc.latency_base_ms = sim_base;
            nc.latency_per_kb_ms = sim_per_kb;
            nc.seed = sim_seed;
            const std::uint64_t payload =
                static_cast<std::uint64_t>(sim_payload_kb * 1024.0 + 0.5);
            const double ms = ssc::chain::measure_consensus(nc, payload);
            std::cout << "nodes,payload_bytes,elapsed_ms,committed\n"
                      << sim_nodes << "," << payload << ","
                      << ssc::experiment::format_double(ms) << ",1\n";
        } else if (*exp) {
            ssc::experiment::ExperimentConfig cfg;
            if (!exp_config.empty()) cfg = ssc::experiment::parse_config_file(exp_config);
            for (const std::string& kv : exp_set) {
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ssc::ConfigError("--set expects key=value, got " + kv);
                ssc::experiment::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (!exp_out.empty()) cfg.out_dir = exp_out;
            const ssc::experiment::SuiteResult r = ssc::experiment::run_experiment_suite(cfg);
            std::cout << "summary: " << r.summary_path
                      << (r.all_passed ? " (all checks passed)" : " (some checks failed)")
                      << "\n";
        }
    } catch (const std::exception& e) {
        if (json_errors) {
            std::cerr << "{\"error\":\"" << error_kind(e) << "\",\"message\":\"";
            for (const char* p = e.what(); *p; ++p) {
                if (*p == '"' || *p == '\\') std::cerr << '\\';
                std::cerr << *p;
            }
            std::cerr << "\"}\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 1;
    }
    return 0;
}
