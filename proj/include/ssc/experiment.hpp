#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssc/chain.hpp"

namespace ssc::experiment {

struct ExperimentConfig {
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t image_size = 32;
    int iterations = 100;
    double eta = 0.01;
    double lambda = 0.0;
    double defense_scale = 0.5;
    double defense_threshold = 0.05;
    std::uint32_t frac_bits = 8;
    std::uint32_t lambda_sec = 80;
    std::size_t proof_image_size = 8;  // proof demos stay small so prove is sub-second
    std::uint64_t net_seed = 42;
    int descriptor_dim = 32;
    int shared_resolution = 32;
    chain::NetConfig chain_base;
    std::string out_dir = "out";

    void validate() const;
};

// key=value lines, '#' comments; keys mirror the CLI flags.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct SuiteResult {
    bool all_passed = false;
    std::string summary_path;
};

// Writes loss_curves.csv, similarity_attack.csv, similarity_defense.csv,
// consensus_overhead.csv, zkp_overhead.csv and summary.json into cfg.out_dir.
// Files are staged as <name>.partial and renamed on completion, so a failed
// stage leaves its partial output behind.
SuiteResult run_experiment_suite(const ExperimentConfig& cfg);

// Canonical double formatting shared by every CSV writer (%.17g).
std::string format_double(double v);

}  // namespace ssc::experiment
