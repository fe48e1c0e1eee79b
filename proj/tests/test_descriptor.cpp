#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ssc/descriptor.hpp"

using namespace ssc;
using testutil::finite_diff;
using testutil::grad_rel_error;
using testutil::random_tensor;

namespace {
Tensor manual_forward(const desc::DescriptorNetwork& net, const Tensor& image, int s) {
    Tensor t = bilinear_resize(image, s, s);
    for (const ConvLayer& l : net.layers) t = relu(conv2d_forward(t, l));
    return t;
}
}  // namespace

TEST_CASE("zero image isolates the biases") {
    const auto net = desc::DescriptorNetwork::make(7);
    const Tensor zero(32, 32, 3);
    const Tensor got = desc::extract_activations(net, zero, 32);
    const Tensor want = manual_forward(net, zero, 32);
    REQUIRE(got.same_shape(want));
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got.data()[i] == want.data()[i]);
}

TEST_CASE("extract_activations equals manual layer composition") {
    SplitMix64 rng(1);
    const auto net = desc::DescriptorNetwork::make(42);
    const Tensor img = random_tensor(rng, 24, 24, 3);
    const Tensor got = desc::extract_activations(net, img, 32);
    const Tensor want = manual_forward(net, img, 32);
    REQUIRE(got.same_shape(want));
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
}

TEST_CASE("s equal to the image side skips the resize") {
    SplitMix64 rng(2);
    const auto net = desc::DescriptorNetwork::make(42);
    const Tensor img = random_tensor(rng, 32, 32, 3);
    const Tensor a = desc::extract_activations(net, img, 32);
    Tensor t = img;
    for (const ConvLayer& l : net.layers) t = relu(conv2d_forward(t, l));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == t.data()[i]);
}

TEST_CASE("preconditions: channels and resolution") {
    const auto net = desc::DescriptorNetwork::make(1);
    SplitMix64 rng(3);
    CHECK_THROWS_AS(desc::extract_activations(net, random_tensor(rng, 16, 16, 1), 32),
                    DimensionError);
    CHECK_THROWS_AS(desc::extract_activations(net, random_tensor(rng, 16, 16, 3), 4),
                    DimensionError);
}

TEST_CASE("descriptors are unit norm and deterministic") {
    SplitMix64 rng(4);
    const auto net = desc::DescriptorNetwork::make(42);
    const Tensor img = random_tensor(rng, 20, 20, 3);
    const desc::Descriptor d1 = desc::extract_descriptor(net, img, 32);
    const desc::Descriptor d2 = desc::extract_descriptor(net, img, 32);
    REQUIRE(d1.values.size() == 32);
    double norm = 0;
    for (double v : d1.values) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t i = 0; i < d1.values.size(); ++i) CHECK(d1.values[i] == d2.values[i]);
}

TEST_CASE("equal seeds give bitwise-equal descriptors; different seeds differ") {
    SplitMix64 rng(5);
    const Tensor img = random_tensor(rng, 16, 16, 3);
    const auto a = desc::DescriptorNetwork::make(99);
    const auto b = desc::DescriptorNetwork::make(99);
    const auto c = desc::DescriptorNetwork::make(100);
    const auto da = desc::extract_descriptor(a, img, 32);
    const auto db = desc::extract_descriptor(b, img, 32);
    const auto dc = desc::extract_descriptor(c, img, 32);
    bool all_equal_ac = true;
    for (std::size_t i = 0; i < da.values.size(); ++i) {
        CHECK(da.values[i] == db.values[i]);
        all_equal_ac = all_equal_ac && da.values[i] == dc.values[i];
    }
    CHECK_FALSE(all_equal_ac);
}

TEST_CASE("similarity: unit, orthogonal, negated, symmetric") {
    desc::Descriptor v{{0.6, 0.8}}, w{{-0.8, 0.6}}, nv{{-0.6, -0.8}};
    CHECK(desc::similarity(v, v) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(desc::similarity(v, w) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(desc::similarity(v, nv) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(desc::similarity(v, w) == desc::similarity(w, v));
    desc::Descriptor bad{{1.0, 0.0, 0.0}};
    CHECK_THROWS_AS(desc::similarity(v, bad), DimensionError);
}

TEST_CASE("tiny perturbations keep similarity near 1") {
    SplitMix64 rng(6);
    const auto net = desc::DescriptorNetwork::make(42);
    Tensor img = random_tensor(rng, 16, 16, 3, 0.05, 0.95);
    const auto d0 = desc::extract_descriptor(net, img, 32);
    Tensor pert = img;
    for (double& v : pert.data()) v += rng.next_uniform(-1e-6, 1e-6);
    CHECK(desc::similarity(d0, desc::extract_descriptor(net, pert, 32)) > 0.999);
}

TEST_CASE("single-pixel epsilon perturbation barely moves similarity (20 seeds)") {
    const auto net = desc::DescriptorNetwork::make(42);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SplitMix64 rng(seed);
        Tensor img = random_tensor(rng, 16, 16, 3, 0.05, 0.95);
        const auto d0 = desc::extract_descriptor(net, img, 32);
        Tensor pert = img;
        pert.data()[rng.next_below(pert.size())] += 1e-4;
        CHECK(std::abs(1.0 - desc::similarity(d0, desc::extract_descriptor(net, pert, 32))) < 1e-2);
    }
}

TEST_CASE("backward_from_descriptor matches finite differences") {
    SplitMix64 rng(7);
    const auto net = desc::DescriptorNetwork::make(42);
    const Tensor img = random_tensor(rng, 12, 12, 3, 0.05, 0.95);
    std::vector<double> up(32);
    for (double& v : up) v = rng.next_uniform(-1.0, 1.0);

    const desc::ForwardCache cache = desc::forward_activations(net, img, 32);
    const Tensor analytic = desc::backward_from_descriptor(net, cache, up);
    const Tensor fd = finite_diff(img, [&](const Tensor& x) {
        const desc::Descriptor d = desc::extract_descriptor(net, x, 32);
        double s = 0;
        for (std::size_t i = 0; i < d.values.size(); ++i) s += d.values[i] * up[i];
        return s;
    });
    CHECK(grad_rel_error(analytic, fd) < 1e-3);
}

TEST_CASE("backward_from_activations matches finite differences") {
    SplitMix64 rng(8);
    const auto net = desc::DescriptorNetwork::make(42);
    const Tensor img = random_tensor(rng, 12, 12, 3, 0.05, 0.95);
    const desc::ForwardCache cache = desc::forward_activations(net, img, 32);
    const Tensor up = random_tensor(rng, cache.activations.width(), cache.activations.height(),
                                    cache.activations.channels(), -1.0, 1.0);
    const Tensor analytic = desc::backward_from_activations(net, cache, up);
    const Tensor fd = finite_diff(img, [&](const Tensor& x) {
        const Tensor act = desc::extract_activations(net, x, 32);
        double s = 0;
        for (std::size_t i = 0; i < act.size(); ++i) s += act.data()[i] * up.data()[i];
        return s;
    });
    CHECK(grad_rel_error(analytic, fd) < 1e-3);
}
