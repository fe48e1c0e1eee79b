#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ssc/descriptor.hpp"
#include "ssc/tensor.hpp"

namespace ssc::attack {

enum class LossKind { Global, Tensor, Hist };

const char* loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

std::vector<double> default_bins();  // 16 centers uniform on [0, 4]

struct AttackConfig {
    LossKind loss_kind = LossKind::Global;
    double lambda = 0.0;   // distortion weight
    double eta = 0.01;     // learning rate
    double epsilon = 1e-8; // Adam epsilon
    double beta1 = 0.9, beta2 = 0.999;
    int iterations = 100;
    std::vector<double> bins = default_bins();
    int s = 32;  // shared attack resolution

    void validate() const;
};

struct AttackInstance {
    Tensor target;   // x_t: the authentic image whose descriptor is imitated
    Tensor carrier;  // x_c: the visually plausible disguise
    std::string meta_target, meta_carrier;  // opaque labels, never read by algorithms
};

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

struct TraceRow {
    int iter;
    double total, perf, distortion, sim_target, sim_carrier;
};

struct AttackTrace {
    std::vector<TraceRow> rows;
    void write_csv(std::ostream& out) const;  // header: iter,total,perf,distortion,sim_target,sim_carrier
};

struct LossEval {
    double value = 0.0;
    Tensor grad;
};

// Target-side quantities computed once per attack.
struct TargetFeatures {
    Tensor activations;                            // g_{x_t}
    desc::Descriptor descriptor;                   // h_{x_t}
    std::vector<std::vector<double>> histograms;   // soft histogram per channel
};
TargetFeatures target_features(const desc::DescriptorNetwork& net, const Tensor& target, int s,
                               const std::vector<double>& bins);

// Per-channel soft histogram with a triangular kernel over uniform bin centers.
std::vector<std::vector<double>> soft_histogram(const Tensor& activations,
                                                const std::vector<double>& bins);

// l_global = 1 - h_x . h_{x_t}
LossEval loss_global(const desc::DescriptorNetwork& net, const Tensor& x, const Tensor& x_t, int s);
// l_tensor = ||g_x - g_{x_t}||^2 / (w h d)
LossEval loss_tensor(const desc::DescriptorNetwork& net, const Tensor& x, const Tensor& x_t, int s);
// l_hist = (1/d) sum_i || u(g_x, b)_i - u(g_{x_t}, b)_i ||_1
LossEval loss_hist(const desc::DescriptorNetwork& net, const Tensor& x, const Tensor& x_t, int s,
                   const std::vector<double>& bins);

LossEval performance_loss(const AttackConfig& cfg, const desc::DescriptorNetwork& net,
                          const Tensor& x, const TargetFeatures& target, int s);
// L = l_perf + lambda ||x - x_c||^2
LossEval total_loss(const AttackConfig& cfg, const desc::DescriptorNetwork& net, const Tensor& x,
                    const AttackInstance& instance);

// One bias-corrected Adam step on the flattened image, clamped to [0, 1].
Tensor adam_step(AdamState& state, const Tensor& x, const Tensor& grad, const AttackConfig& cfg);

std::pair<Tensor, AttackTrace> run_attack(const desc::DescriptorNetwork& net,
                                          const AttackInstance& instance, const AttackConfig& cfg);

}  // namespace ssc::attack
