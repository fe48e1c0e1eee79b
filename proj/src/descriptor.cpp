#include "ssc/descriptor.hpp"

#include <cmath>
#include <string>

#include "ssc/rng.hpp"

namespace ssc::desc {

static ConvLayer init_layer(SplitMix64& rng, int in_ch, int out_ch, int k, int stride, int pad) {
    ConvLayer layer;
    layer.in_ch = in_ch;
    layer.out_ch = out_ch;
    layer.k = k;
    layer.stride = stride;
    layer.padding = pad;
    const double fan_in = static_cast<double>(in_ch) * k * k;
    const double fan_out = static_cast<double>(out_ch) * k * k;
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    layer.kernels.resize(static_cast<std::size_t>(out_ch) * in_ch * k * k);
    for (double& w : layer.kernels) w = rng.next_uniform(-a, a);
    layer.bias.resize(out_ch);
    for (double& b : layer.bias) b = rng.next_uniform(-a, a);
    return layer;
}

DescriptorNetwork DescriptorNetwork::make(std::uint64_t seed, int dim) {
    if (dim < 1) throw DimensionError("descriptor dim must be >= 1");
    DescriptorNetwork net;
    net.seed = seed;
    net.dim = dim;
    SplitMix64 rng(seed);
    net.layers.push_back(init_layer(rng, 3, 16, 3, 2, 1));
    net.layers.push_back(init_layer(rng, 16, 32, 3, 2, 1));
    net.layers.push_back(init_layer(rng, 32, dim, 3, 1, 1));
    return net;
}

ForwardCache forward_activations(const DescriptorNetwork& net, const Tensor& image, int s) {
    if (image.channels() != 3)
        throw DimensionError("descriptor input must have 3 channels, got " +
                             std::to_string(image.channels()));
    if (s < 8) throw DimensionError("attack resolution s must be >= 8, got " + std::to_string(s));

    ForwardCache cache;
    cache.in_w = image.width();
    cache.in_h = image.height();
    cache.resized = bilinear_resize(image, s, s);

    Tensor cur = cache.resized;
    for (const ConvLayer& layer : net.layers) {
        cache.conv_in.push_back(cur);
        Tensor pre = conv2d_forward(cur, layer);
        cache.preact.push_back(pre);
        cur = relu(pre);
    }
    cache.activations = cur;
    return cache;
}

Tensor extract_activations(const DescriptorNetwork& net, const Tensor& image, int s) {
    return forward_activations(net, image, s).activations;
}

Descriptor descriptor_from_activations(const Tensor& activations) {
    Tensor pooled = global_avg_pool(activations);
    Tensor unit = l2_normalize(pooled);  // throws on degenerate (all-zero) pooled vector
    return Descriptor{unit.data()};
}

Descriptor extract_descriptor(const DescriptorNetwork& net, const Tensor& image, int s) {
    return descriptor_from_activations(extract_activations(net, image, s));
}

double similarity(const Descriptor& a, const Descriptor& b) {
    if (a.values.size() != b.values.size())
        throw DimensionError("descriptor length mismatch: " + std::to_string(a.values.size()) +
                             " vs " + std::to_string(b.values.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

Tensor backward_from_activations(const DescriptorNetwork& net, const ForwardCache& cache,
                                 const Tensor& d_act) {
    Tensor grad = relu_grad(cache.preact.back(), d_act);
    for (int i = static_cast<int>(net.layers.size()) - 1; i >= 0; --i) {
        grad = conv2d_input_grad(cache.conv_in[i], net.layers[i], grad);
        if (i > 0) grad = relu_grad(cache.preact[i - 1], grad);
    }
    // grad is now w.r.t. the resized image; undo the resampling.
    Tensor orig(cache.in_w, cache.in_h, 3);
    return bilinear_resize_grad(orig, cache.resized.width(), cache.resized.height(), grad);
}

Tensor backward_from_descriptor(const DescriptorNetwork& net, const ForwardCache& cache,
                                const std::vector<double>& d_desc) {
    Tensor pooled = global_avg_pool(cache.activations);
    if (d_desc.size() != pooled.size()) throw DimensionError("descriptor gradient length mismatch");
    Tensor up = Tensor::from_data(1, 1, pooled.channels(), std::vector<double>(d_desc));
    Tensor d_pooled = l2_normalize_grad(pooled, up);
    Tensor d_act = global_avg_pool_grad(cache.activations, d_pooled);
    return backward_from_activations(net, cache, d_act);
}

}  // namespace ssc::desc
