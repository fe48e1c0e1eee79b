#pragma once

#include <cstdint>
#include <vector>

#include "ssc/tensor.hpp"

namespace ssc::desc {

// Unit-norm d-dimensional semantic descriptor.
struct Descriptor {
    std::vector<double> values;
};

// Fixed convolutional feature extractor plus pooling/normalization head.
// conv(3->16, k3, s2, p1) -> relu -> conv(16->32, k3, s2, p1) -> relu
// -> conv(32->d, k3, s1, p1) -> relu -> global_avg_pool -> l2_normalize.
// All weights are a pure function of the seed.
struct DescriptorNetwork {
    std::vector<ConvLayer> layers;
    std::uint64_t seed = 0;
    int dim = 32;

    static DescriptorNetwork make(std::uint64_t seed, int dim = 32);
};

// Everything needed to backpropagate an image gradient through the network.
struct ForwardCache {
    int in_w = 0, in_h = 0;
    Tensor resized;
    std::vector<Tensor> conv_in;  // input to each conv layer
    std::vector<Tensor> preact;   // conv output, pre-relu
    Tensor activations;           // relu(preact.back())
};

ForwardCache forward_activations(const DescriptorNetwork& net, const Tensor& image, int s);

Tensor extract_activations(const DescriptorNetwork& net, const Tensor& image, int s);
Descriptor extract_descriptor(const DescriptorNetwork& net, const Tensor& image, int s);
Descriptor descriptor_from_activations(const Tensor& activations);

double similarity(const Descriptor& a, const Descriptor& b);

// dL/dx given dL/d(activations); chains relu/conv grads and the resize transpose.
Tensor backward_from_activations(const DescriptorNetwork& net, const ForwardCache& cache,
                                 const Tensor& d_act);
// dL/dx given dL/d(descriptor); adds the normalize + pool stages on top.
Tensor backward_from_descriptor(const DescriptorNetwork& net, const ForwardCache& cache,
                                const std::vector<double>& d_desc);

}  // namespace ssc::desc
