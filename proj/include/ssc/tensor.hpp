#pragma once

#include <cstddef>
#include <vector>

#include "ssc/errors.hpp"

namespace ssc {

// Dense 3-D tensor of doubles, row-major in (y, x, c) order.
// Holds images (W x H x 3), activation maps (w x h x d) and pooled vectors (1 x 1 x d).
class Tensor {
public:
    Tensor() = default;
    Tensor(int width, int height, int channels, double fill = 0.0);
    static Tensor from_data(int width, int height, int channels, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    double& at(int x, int y, int c) { return data_[index(x, y, c)]; }
    double at(int x, int y, int c) const { return data_[index(x, y, c)]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Tensor& o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }
    bool all_finite() const;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }
    int width_ = 0, height_ = 0, channels_ = 0;
    std::vector<double> data_;
};

// 2-D convolution layer, square odd kernel, kernels in (out, in, ky, kx) order.
struct ConvLayer {
    int out_ch = 0, in_ch = 0, k = 1, stride = 1, padding = 0;
    std::vector<double> kernels;  // out_ch * in_ch * k * k
    std::vector<double> bias;     // out_ch

    double kernel_at(int o, int i, int ky, int kx) const {
        return kernels[((static_cast<std::size_t>(o) * in_ch + i) * k + ky) * k + kx];
    }
    int out_dim(int in) const { return (in + 2 * padding - k) / stride + 1; }
    void validate() const;
};

Tensor conv2d_forward(const Tensor& input, const ConvLayer& layer);
// Returns d<upstream, conv2d_forward(input)>/d input; same dims as input.
Tensor conv2d_input_grad(const Tensor& input, const ConvLayer& layer, const Tensor& upstream);

Tensor relu(const Tensor& input);
Tensor relu_grad(const Tensor& input, const Tensor& upstream);

Tensor global_avg_pool(const Tensor& input);  // 1 x 1 x d
Tensor global_avg_pool_grad(const Tensor& input, const Tensor& upstream);

Tensor l2_normalize(const Tensor& v);  // 1 x 1 x d, unit norm
Tensor l2_normalize_grad(const Tensor& v, const Tensor& upstream);

// Source taps of one output coordinate under half-pixel bilinear resampling.
// lo == hi means the sample falls exactly on (or is clamped to) a grid line.
struct AxisSample {
    int lo = 0, hi = 0;
    double frac = 0.0;  // weight of hi; lo carries 1 - frac
};
AxisSample axis_sample(int out_i, int in_n, int out_n);

Tensor bilinear_resize(const Tensor& input, int out_w, int out_h);
// Transpose of the resampling map: scatters upstream back onto input dims.
Tensor bilinear_resize_grad(const Tensor& input, int out_w, int out_h, const Tensor& upstream);

}  // namespace ssc
