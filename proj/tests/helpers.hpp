#pragma once

#include <cmath>
#include <functional>

#include "ssc/rng.hpp"
#include "ssc/tensor.hpp"

namespace testutil {

inline ssc::Tensor random_tensor(ssc::SplitMix64& rng, int w, int h, int c, double lo = 0.0,
                                 double hi = 1.0) {
    ssc::Tensor t(w, h, c);
    for (double& v : t.data()) v = rng.next_uniform(lo, hi);
    return t;
}

// Central finite differences of a scalar function of x, one entry at a time.
inline ssc::Tensor finite_diff(ssc::Tensor x, const std::function<double(const ssc::Tensor&)>& f,
                               double h = 1e-5) {
    ssc::Tensor g(x.width(), x.height(), x.channels());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x.data()[i];
        x.data()[i] = orig + h;
        const double fp = f(x);
        x.data()[i] = orig - h;
        const double fm = f(x);
        x.data()[i] = orig;
        g.data()[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Max absolute deviation normalized by the gradient's own scale.
inline double grad_rel_error(const ssc::Tensor& a, const ssc::Tensor& b) {
    double scale = 1e-6, err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max({scale, std::abs(a.data()[i]), std::abs(b.data()[i])});
        err = std::max(err, std::abs(a.data()[i] - b.data()[i]));
    }
    return err / scale;
}

}  // namespace testutil
