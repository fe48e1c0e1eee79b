#include "ssc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssc {

Tensor::Tensor(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1 || channels < 1)
        throw DimensionError("tensor dims must be >= 1, got " + std::to_string(width) + "x" +
                             std::to_string(height) + "x" + std::to_string(channels));
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Tensor Tensor::from_data(int width, int height, int channels, std::vector<double> data) {
    Tensor t(width, height, channels);
    if (data.size() != t.data_.size())
        throw DimensionError("data length " + std::to_string(data.size()) + " != " +
                             std::to_string(t.data_.size()));
    t.data_ = std::move(data);
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void ConvLayer::validate() const {
    if (k < 1 || k % 2 == 0) throw DimensionError("kernel size must be odd, got " + std::to_string(k));
    if (stride < 1 || padding < 0) throw DimensionError("bad stride/padding");
    if (kernels.size() != static_cast<std::size_t>(out_ch) * in_ch * k * k)
        throw DimensionError("kernel array length mismatch");
    if (bias.size() != static_cast<std::size_t>(out_ch)) throw DimensionError("bias length mismatch");
}

Tensor conv2d_forward(const Tensor& input, const ConvLayer& layer) {
    layer.validate();
    if (input.channels() != layer.in_ch)
        throw DimensionError("conv input channels " + std::to_string(input.channels()) +
                             " != layer in_ch " + std::to_string(layer.in_ch));
    const int ow = layer.out_dim(input.width());
    const int oh = layer.out_dim(input.height());
    if (ow < 1 || oh < 1)
        throw DimensionError("conv output dims degenerate: " + std::to_string(ow) + "x" + std::to_string(oh));

    Tensor out(ow, oh, layer.out_ch);
    const int k = layer.k, stride = layer.stride, pad = layer.padding;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int oc = 0; oc < layer.out_ch; ++oc) {
                double acc = layer.bias[oc];
                for (int ic = 0; ic < layer.in_ch; ++ic) {
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= input.height()) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= input.width()) continue;
                            acc += layer.kernel_at(oc, ic, ky, kx) * input.at(ix, iy, ic);
                        }
                    }
                }
                out.at(ox, oy, oc) = acc;
            }
        }
    }
    return out;
}

Tensor conv2d_input_grad(const Tensor& input, const ConvLayer& layer, const Tensor& upstream) {
    layer.validate();
    if (input.channels() != layer.in_ch)
        throw DimensionError("conv input channels mismatch in gradient");
    const int ow = layer.out_dim(input.width());
    const int oh = layer.out_dim(input.height());
    if (upstream.width() != ow || upstream.height() != oh || upstream.channels() != layer.out_ch)
        throw DimensionError("upstream dims " + std::to_string(upstream.width()) + "x" +
                             std::to_string(upstream.height()) + "x" + std::to_string(upstream.channels()) +
                             " != conv output dims " + std::to_string(ow) + "x" + std::to_string(oh) +
                             "x" + std::to_string(layer.out_ch));

    Tensor grad(input.width(), input.height(), input.channels());
    const int k = layer.k, stride = layer.stride, pad = layer.padding;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int oc = 0; oc < layer.out_ch; ++oc) {
                const double up = upstream.at(ox, oy, oc);
                if (up == 0.0) continue;
                for (int ic = 0; ic < layer.in_ch; ++ic) {
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= input.height()) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= input.width()) continue;
                            grad.at(ix, iy, ic) += up * layer.kernel_at(oc, ic, ky, kx);
                        }
                    }
                }
            }
        }
    }
    return grad;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor relu_grad(const Tensor& input, const Tensor& upstream) {
    if (!input.same_shape(upstream)) throw DimensionError("relu_grad shape mismatch");
    Tensor out = upstream;
    for (std::size_t i = 0; i < out.data().size(); ++i)
        if (input.data()[i] <= 0.0) out.data()[i] = 0.0;  // subgradient 0 at exactly 0
    return out;
}

Tensor global_avg_pool(const Tensor& input) {
    Tensor out(1, 1, input.channels());
    const double inv = 1.0 / (static_cast<double>(input.width()) * input.height());
    for (int y = 0; y < input.height(); ++y)
        for (int x = 0; x < input.width(); ++x)
            for (int c = 0; c < input.channels(); ++c) out.at(0, 0, c) += input.at(x, y, c) * inv;
    return out;
}

Tensor global_avg_pool_grad(const Tensor& input, const Tensor& upstream) {
    if (upstream.width() != 1 || upstream.height() != 1 || upstream.channels() != input.channels())
        throw DimensionError("pool upstream must be 1x1x" + std::to_string(input.channels()));
    Tensor grad(input.width(), input.height(), input.channels());
    const double inv = 1.0 / (static_cast<double>(input.width()) * input.height());
    for (int y = 0; y < input.height(); ++y)
        for (int x = 0; x < input.width(); ++x)
            for (int c = 0; c < input.channels(); ++c) grad.at(x, y, c) = upstream.at(0, 0, c) * inv;
    return grad;
}

static double vec_norm(const Tensor& v) {
    double s = 0.0;
    for (double x : v.data()) s += x * x;
    return std::sqrt(s);
}

Tensor l2_normalize(const Tensor& v) {
    if (v.width() != 1 || v.height() != 1) throw DimensionError("l2_normalize expects a 1x1xd tensor");
    const double n = vec_norm(v);
    if (n <= 1e-12) throw DegenerateDescriptorError("l2_normalize: vector norm " + std::to_string(n));
    Tensor out = v;
    for (double& x : out.data()) x /= n;
    return out;
}

// Jacobian (I - u u^T) / ||v|| applied to upstream, u = v/||v||.
Tensor l2_normalize_grad(const Tensor& v, const Tensor& upstream) {
    if (!v.same_shape(upstream)) throw DimensionError("l2_normalize_grad shape mismatch");
    const double n = vec_norm(v);
    if (n <= 1e-12) throw DegenerateDescriptorError("l2_normalize_grad: vector norm " + std::to_string(n));
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += (v.data()[i] / n) * upstream.data()[i];
    Tensor grad = upstream;
    for (std::size_t i = 0; i < v.size(); ++i)
        grad.data()[i] = (upstream.data()[i] - (v.data()[i] / n) * dot) / n;
    return grad;
}

AxisSample axis_sample(int out_i, int in_n, int out_n) {
    AxisSample s;
    double src = (out_i + 0.5) * static_cast<double>(in_n) / out_n - 0.5;
    if (src < 0.0) src = 0.0;
    if (src > in_n - 1) src = in_n - 1;
    s.lo = static_cast<int>(std::floor(src));
    s.frac = src - s.lo;
    s.hi = std::min(s.lo + 1, in_n - 1);
    if (s.hi == s.lo) s.frac = 0.0;
    return s;
}

Tensor bilinear_resize(const Tensor& input, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw DimensionError("resize target dims must be >= 1");
    if (out_w == input.width() && out_h == input.height()) return input;

    Tensor out(out_w, out_h, input.channels());
    std::vector<AxisSample> xs(out_w), ys(out_h);
    for (int x = 0; x < out_w; ++x) xs[x] = axis_sample(x, input.width(), out_w);
    for (int y = 0; y < out_h; ++y) ys[y] = axis_sample(y, input.height(), out_h);

    for (int y = 0; y < out_h; ++y) {
        const AxisSample& sy = ys[y];
        for (int x = 0; x < out_w; ++x) {
            const AxisSample& sx = xs[x];
            for (int c = 0; c < input.channels(); ++c) {
                const double top = (1.0 - sx.frac) * input.at(sx.lo, sy.lo, c) +
                                   sx.frac * input.at(sx.hi, sy.lo, c);
                const double bot = (1.0 - sx.frac) * input.at(sx.lo, sy.hi, c) +
                                   sx.frac * input.at(sx.hi, sy.hi, c);
                out.at(x, y, c) = (1.0 - sy.frac) * top + sy.frac * bot;
            }
        }
    }
    return out;
}

Tensor bilinear_resize_grad(const Tensor& input, int out_w, int out_h, const Tensor& upstream) {
    if (upstream.width() != out_w || upstream.height() != out_h ||
        upstream.channels() != input.channels())
        throw DimensionError("resize_grad upstream dims mismatch");
    if (out_w == input.width() && out_h == input.height()) return upstream;

    Tensor grad(input.width(), input.height(), input.channels());
    std::vector<AxisSample> xs(out_w), ys(out_h);
    for (int x = 0; x < out_w; ++x) xs[x] = axis_sample(x, input.width(), out_w);
    for (int y = 0; y < out_h; ++y) ys[y] = axis_sample(y, input.height(), out_h);

    for (int y = 0; y < out_h; ++y) {
        const AxisSample& sy = ys[y];
        for (int x = 0; x < out_w; ++x) {
            const AxisSample& sx = xs[x];
            for (int c = 0; c < input.channels(); ++c) {
                const double up = upstream.at(x, y, c);
                grad.at(sx.lo, sy.lo, c) += (1.0 - sx.frac) * (1.0 - sy.frac) * up;
                grad.at(sx.hi, sy.lo, c) += sx.frac * (1.0 - sy.frac) * up;
                grad.at(sx.lo, sy.hi, c) += (1.0 - sx.frac) * sy.frac * up;
                grad.at(sx.hi, sy.hi, c) += sx.frac * sy.frac * up;
            }
        }
    }
    return grad;
}

}  // namespace ssc
