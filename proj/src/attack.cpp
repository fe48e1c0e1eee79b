#include "ssc/attack.hpp"

#include <cmath>
#include <cstdio>

namespace ssc::attack {

const char* loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::Global: return "global";
        case LossKind::Tensor: return "tensor";
        case LossKind::Hist: return "hist";
    }
    return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "global") return LossKind::Global;
    if (name == "tensor") return LossKind::Tensor;
    if (name == "hist") return LossKind::Hist;
    throw ConfigError("unknown loss kind: " + name);
}

std::vector<double> default_bins() {
    std::vector<double> bins(16);
    for (int k = 0; k < 16; ++k) bins[k] = 4.0 * k / 15.0;
    return bins;
}

void AttackConfig::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (eta <= 0.0) throw ConfigError("eta must be > 0");
    if (epsilon <= 0.0) throw ConfigError("epsilon must be > 0");
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0)
        throw ConfigError("beta1/beta2 must lie in (0, 1)");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (bins.size() < 2) throw ConfigError("need at least 2 histogram bins");
    const double delta = bins[1] - bins[0];
    for (std::size_t k = 1; k < bins.size(); ++k) {
        const double step = bins[k] - bins[k - 1];
        if (step <= 0.0 || std::abs(step - delta) > 1e-9 * std::max(1.0, std::abs(delta)))
            throw ConfigError("bins must be strictly increasing and uniformly spaced");
    }
}

void AttackTrace::write_csv(std::ostream& out) const {
    out << "iter,total,perf,distortion,sim_target,sim_carrier\n";
    char buf[256];
    for (const TraceRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.total,
                      r.perf, r.distortion, r.sim_target, r.sim_carrier);
        out << buf;
    }
}

std::vector<std::vector<double>> soft_histogram(const Tensor& activations,
                                                const std::vector<double>& bins) {
    const double delta = bins[1] - bins[0];
    const double inv_area = 1.0 / (static_cast<double>(activations.width()) * activations.height());
    std::vector<std::vector<double>> hist(activations.channels(),
                                          std::vector<double>(bins.size(), 0.0));
    for (int y = 0; y < activations.height(); ++y)
        for (int x = 0; x < activations.width(); ++x)
            for (int c = 0; c < activations.channels(); ++c) {
                const double g = activations.at(x, y, c);
                for (std::size_t k = 0; k < bins.size(); ++k) {
                    const double w = 1.0 - std::abs(g - bins[k]) / delta;
                    if (w > 0.0) hist[c][k] += w * inv_area;
                }
            }
    return hist;
}

TargetFeatures target_features(const desc::DescriptorNetwork& net, const Tensor& target, int s,
                               const std::vector<double>& bins) {
    TargetFeatures tf;
    tf.activations = desc::extract_activations(net, target, s);
    tf.descriptor = desc::descriptor_from_activations(tf.activations);
    tf.histograms = soft_histogram(tf.activations, bins);
    return tf;
}

static LossEval eval_global(const desc::DescriptorNetwork& net, const Tensor& x,
                            const TargetFeatures& target, int s) {
    desc::ForwardCache cache = desc::forward_activations(net, x, s);
    desc::Descriptor h = desc::descriptor_from_activations(cache.activations);
    LossEval e;
    e.value = 1.0 - desc::similarity(h, target.descriptor);
    std::vector<double> d_desc(target.descriptor.values.size());
    for (std::size_t i = 0; i < d_desc.size(); ++i) d_desc[i] = -target.descriptor.values[i];
    e.grad = desc::backward_from_descriptor(net, cache, d_desc);
    return e;
}

static LossEval eval_tensor(const desc::DescriptorNetwork& net, const Tensor& x,
                            const TargetFeatures& target, int s) {
    desc::ForwardCache cache = desc::forward_activations(net, x, s);
    const Tensor& g = cache.activations;
    if (!g.same_shape(target.activations))
        throw DimensionError("activation tensor shape mismatch between x and x_t");
    const double inv = 1.0 / static_cast<double>(g.size());
    LossEval e;
    Tensor d_act(g.width(), g.height(), g.channels());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double diff = g.data()[i] - target.activations.data()[i];
        e.value += diff * diff * inv;
        d_act.data()[i] = 2.0 * diff * inv;
    }
    e.grad = desc::backward_from_activations(net, cache, d_act);
    return e;
}

static double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

static LossEval eval_hist(const desc::DescriptorNetwork& net, const Tensor& x,
                          const TargetFeatures& target, int s, const std::vector<double>& bins) {
    desc::ForwardCache cache = desc::forward_activations(net, x, s);
    const Tensor& g = cache.activations;
    const double delta = bins[1] - bins[0];
    const int d = g.channels();

    std::vector<std::vector<double>> hist = soft_histogram(g, bins);
    LossEval e;
    std::vector<std::vector<double>> sgn(d, std::vector<double>(bins.size()));
    for (int c = 0; c < d; ++c)
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double diff = hist[c][k] - target.histograms[c][k];
            e.value += std::abs(diff) / d;
            sgn[c][k] = sign_of(diff) / d;
        }

    const double inv_area = 1.0 / (static_cast<double>(g.width()) * g.height());
    Tensor d_act(g.width(), g.height(), g.channels());
    for (int y = 0; y < g.height(); ++y)
        for (int xx = 0; xx < g.width(); ++xx)
            for (int c = 0; c < d; ++c) {
                const double gv = g.at(xx, y, c);
                double acc = 0.0;
                for (std::size_t k = 0; k < bins.size(); ++k) {
                    const double dist = gv - bins[k];
                    if (dist != 0.0 && std::abs(dist) < delta)
                        acc += sgn[c][k] * (-sign_of(dist) / delta) * inv_area;
                }
                d_act.at(xx, y, c) = acc;
            }
    e.grad = desc::backward_from_activations(net, cache, d_act);
    return e;
}

LossEval performance_loss(const AttackConfig& cfg, const desc::DescriptorNetwork& net,
                          const Tensor& x, const TargetFeatures& target, int s) {
    switch (cfg.loss_kind) {
        case LossKind::Global: return eval_global(net, x, target, s);
        case LossKind::Tensor: return eval_tensor(net, x, target, s);
        case LossKind::Hist: return eval_hist(net, x, target, s, cfg.bins);
    }
    throw ConfigError("bad loss kind");
}

LossEval loss_global(const desc::DescriptorNetwork& net, const Tensor& x, const Tensor& x_t, int s) {
    AttackConfig cfg;
    return eval_global(net, x, target_features(net, x_t, s, cfg.bins), s);
}

LossEval loss_tensor(const desc::DescriptorNetwork& net, const Tensor& x, const Tensor& x_t, int s) {
    AttackConfig cfg;
    return eval_tensor(net, x, target_features(net, x_t, s, cfg.bins), s);
}

LossEval loss_hist(const desc::DescriptorNetwork& net, const Tensor& x, const Tensor& x_t, int s,
                   const std::vector<double>& bins) {
    return eval_hist(net, x, target_features(net, x_t, s, bins), s, bins);
}

LossEval total_loss(const AttackConfig& cfg, const desc::DescriptorNetwork& net, const Tensor& x,
                    const AttackInstance& instance) {
    cfg.validate();
    if (!instance.target.same_shape(instance.carrier) || !x.same_shape(instance.target))
        throw DimensionError("x, target and carrier must share dims");
    TargetFeatures target = target_features(net, instance.target, cfg.s, cfg.bins);
    LossEval e = performance_loss(cfg, net, x, target, cfg.s);
    if (cfg.lambda > 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double diff = x.data()[i] - instance.carrier.data()[i];
            e.value += cfg.lambda * diff * diff;
            e.grad.data()[i] += 2.0 * cfg.lambda * diff;
        }
    }
    return e;
}

Tensor adam_step(AdamState& state, const Tensor& x, const Tensor& grad, const AttackConfig& cfg) {
    if (state.m.empty()) {
        state.m.assign(x.size(), 0.0);
        state.v.assign(x.size(), 0.0);
    }
    if (state.m.size() != x.size() || !x.same_shape(grad))
        throw DimensionError("adam state/gradient length mismatch");
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    Tensor next = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double g = grad.data()[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        double v = x.data()[i] - cfg.eta * mhat / (std::sqrt(vhat) + cfg.epsilon);
        next.data()[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return next;
}

std::pair<Tensor, AttackTrace> run_attack(const desc::DescriptorNetwork& net,
                                          const AttackInstance& instance, const AttackConfig& cfg) {
    cfg.validate();
    if (!instance.target.same_shape(instance.carrier))
        throw DimensionError("target and carrier dims differ");
    if (instance.target.channels() != 3) throw DimensionError("attack images must have 3 channels");

    TargetFeatures target = target_features(net, instance.target, cfg.s, cfg.bins);
    desc::Descriptor carrier_desc = desc::extract_descriptor(net, instance.carrier, cfg.s);

    Tensor x = instance.carrier;  // optimization starts at the carrier
    AdamState state;
    AttackTrace trace;
    trace.rows.reserve(cfg.iterations + 1);

    for (int iter = 0; iter <= cfg.iterations; ++iter) {
        LossEval perf = performance_loss(cfg, net, x, target, cfg.s);
        double distortion = 0.0;
        if (cfg.lambda > 0.0) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x.data()[i] - instance.carrier.data()[i];
                distortion += diff * diff;
                perf.grad.data()[i] += 2.0 * cfg.lambda * diff;
            }
        }
        distortion *= cfg.lambda;  // record the additive term, so total = perf + distortion
        const double total = perf.value + distortion;
        if (!std::isfinite(total) || !perf.grad.all_finite())
            throw NumericError("non-finite loss or gradient in run_attack", iter);

        desc::Descriptor h = desc::extract_descriptor(net, x, cfg.s);
        trace.rows.push_back({iter, total, perf.value, distortion,
                              desc::similarity(h, target.descriptor),
                              desc::similarity(h, carrier_desc)});
        if (iter < cfg.iterations) x = adam_step(state, x, perf.grad, cfg);
    }
    return {std::move(x), std::move(trace)};
}

}  // namespace ssc::attack
