#include "ssc/defense.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace ssc::defense {

TransformSpec from_fraction(std::uint32_t num, std::uint32_t den) {
    const std::uint32_t g = std::gcd(num, den);
    return TransformSpec{num / g, den / g};
}

TransformSpec TransformSpec::from_scale(double scale) {
    if (!(scale > 0.0) || scale > 1.0) throw ConfigError("transform scale must lie in (0, 1]");
    const std::uint32_t num = static_cast<std::uint32_t>(std::lround(scale * 256.0));
    if (num == 0 || std::abs(scale - num / 256.0) > 1e-9)
        throw ConfigError("transform scale must be rational with denominator <= 256");
    return from_fraction(num, 256);
}

std::string DefenseVerdict::to_json(double scale) const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"sim_before\":%.10g,\"sim_after\":%.10g,\"drop\":%.10g,"
                  "\"flagged\":%s,\"threshold\":%.10g,\"scale\":%.10g}",
                  sim_before, sim_after, drop, flagged ? "true" : "false", threshold, scale);
    return buf;
}

int scaled_dim(int dim, const TransformSpec& spec) {
    const int scaled = static_cast<int>(
        std::lround(static_cast<double>(dim) * spec.num / spec.den));
    return scaled < 1 ? 1 : scaled;
}

void blurred_dims(const Tensor& image, const TransformSpec& spec, int* mid_w, int* mid_h) {
    *mid_w = scaled_dim(image.width(), spec);
    *mid_h = scaled_dim(image.height(), spec);
}

Tensor defend_transform(const Tensor& image, const TransformSpec& spec) {
    int mid_w, mid_h;
    blurred_dims(image, spec, &mid_w, &mid_h);
    Tensor down = bilinear_resize(image, mid_w, mid_h);
    return bilinear_resize(down, image.width(), image.height());
}

DefenseVerdict evaluate_defense(const desc::DescriptorNetwork& net, const Tensor& candidate,
                                const Tensor& reference, const TransformSpec& spec,
                                double threshold, int s) {
    if (!(threshold > 0.0)) throw ConfigError("defense threshold must be > 0");
    DefenseVerdict v;
    v.threshold = threshold;
    v.sim_before = desc::similarity(desc::extract_descriptor(net, candidate, s),
                                    desc::extract_descriptor(net, reference, s));
    v.sim_after = desc::similarity(desc::extract_descriptor(net, defend_transform(candidate, spec), s),
                                   desc::extract_descriptor(net, defend_transform(reference, spec), s));
    v.drop = v.sim_before - v.sim_after;
    v.flagged = v.drop > threshold;
    return v;
}

}  // namespace ssc::defense
