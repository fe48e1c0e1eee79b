#include "ssc/procedural.hpp"

#include <cmath>

#include "ssc/errors.hpp"
#include "ssc/rng.hpp"

namespace ssc::procedural {

Kind kind_from_name(const std::string& name) {
    if (name == "gradient") return Kind::Gradient;
    if (name == "checkerboard") return Kind::Checkerboard;
    if (name == "gaussian_blobs") return Kind::GaussianBlobs;
    throw ConfigError("unknown image kind: " + name);
}

const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::Gradient: return "gradient";
        case Kind::Checkerboard: return "checkerboard";
        case Kind::GaussianBlobs: return "gaussian_blobs";
    }
    return "?";
}

namespace {

Tensor gradient_image(SplitMix64& rng, std::size_t size) {
    // random linear ramp per channel, plus a small seeded offset
    Tensor img(static_cast<int>(size), static_cast<int>(size), 3);
    for (std::size_t c = 0; c < 3; ++c) {
        const double ax = rng.next_uniform(-1.0, 1.0);
        const double ay = rng.next_uniform(-1.0, 1.0);
        const double bias = rng.next_double();
        for (std::size_t y = 0; y < size; ++y) {
            for (std::size_t x = 0; x < size; ++x) {
                const double u = size > 1 ? static_cast<double>(x) / (size - 1) : 0.0;
                const double v = size > 1 ? static_cast<double>(y) / (size - 1) : 0.0;
                double p = 0.5 + 0.5 * (ax * (u - 0.5) + ay * (v - 0.5)) + 0.25 * (bias - 0.5);
                img.at(x, y, c) = p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
            }
        }
    }
    return img;
}

Tensor checkerboard_image(SplitMix64& rng, std::size_t size) {
    const std::size_t cell = 1 + rng.next_below(static_cast<std::uint64_t>(size / 4 + 1));
    double lo[3], hi[3];
    for (std::size_t c = 0; c < 3; ++c) {
        lo[c] = rng.next_uniform(0.0, 0.4);
        hi[c] = rng.next_uniform(0.6, 1.0);
    }
    Tensor img(static_cast<int>(size), static_cast<int>(size), 3);
    for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
            const bool on = ((x / cell) + (y / cell)) % 2 == 0;
            for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = on ? hi[c] : lo[c];
        }
    return img;
}

Tensor blobs_image(SplitMix64& rng, std::size_t size) {
    Tensor img(static_cast<int>(size), static_cast<int>(size), 3);
    std::fill(img.data().begin(), img.data().end(), 0.1);
    const std::size_t blobs = 3 + rng.next_below(4);
    for (std::size_t b = 0; b < blobs; ++b) {
        const double cx = rng.next_double() * size;
        const double cy = rng.next_double() * size;
        const double sigma = size * rng.next_uniform(0.08, 0.25);
        double amp[3];
        for (std::size_t c = 0; c < 3; ++c) amp[c] = rng.next_uniform(0.2, 0.9);
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x) {
                const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
                const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                for (std::size_t c = 0; c < 3; ++c) {
                    double& p = img.at(x, y, c);
                    p = std::min(1.0, p + amp[c] * g);
                }
            }
    }
    return img;
}

}  // namespace

Tensor generate(Kind kind, std::uint64_t seed, std::size_t size) {
    if (size < 1) throw ConfigError("image size must be >= 1");
    // fold the kind into the stream so kinds differ even at equal seeds
    SplitMix64 rng(seed * 3 + static_cast<std::uint64_t>(kind) + 0x9E3779B97F4A7C15ULL);
    switch (kind) {
        case Kind::Gradient: return gradient_image(rng, size);
        case Kind::Checkerboard: return checkerboard_image(rng, size);
        case Kind::GaussianBlobs: return blobs_image(rng, size);
    }
    throw ConfigError("unknown image kind");
}

Tensor generate_any(std::uint64_t seed, std::size_t size) {
    return generate(static_cast<Kind>(seed % 3), seed, size);
}

}  // namespace ssc::procedural
