#pragma once

#include <cstdint>
#include <string>

#include "ssc/descriptor.hpp"
#include "ssc/tensor.hpp"

namespace ssc::defense {

// Down/up bilinear blur factor, kept as an exact rational so the circuit
// module can mirror the sample grid in fixed point. Denominator <= 256.
struct TransformSpec {
    std::uint32_t num = 1;
    std::uint32_t den = 1;

    static TransformSpec from_scale(double scale);
    double scale() const { return static_cast<double>(num) / den; }
    const char* method() const { return "bilinear"; }
    bool operator==(const TransformSpec&) const = default;
};

struct DefenseVerdict {
    double sim_before = 0.0;
    double sim_after = 0.0;
    double drop = 0.0;  // sim_before - sim_after
    bool flagged = false;
    double threshold = 0.0;
    std::string to_json(double scale) const;
};

// Down-sample by spec.scale, then up-sample back to the original dims.
Tensor defend_transform(const Tensor& image, const TransformSpec& spec);

// Dims of the intermediate (down-sampled) image; shared with the circuit.
void blurred_dims(const Tensor& image, const TransformSpec& spec, int* mid_w, int* mid_h);
int scaled_dim(int dim, const TransformSpec& spec);

DefenseVerdict evaluate_defense(const desc::DescriptorNetwork& net, const Tensor& candidate,
                                const Tensor& reference, const TransformSpec& spec,
                                double threshold, int s);

}  // namespace ssc::defense
