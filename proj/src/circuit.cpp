#include "ssc/circuit.hpp"

#include <cmath>
#include <string>

#include "ssc/bytes.hpp"

namespace ssc::circuit {

using field::Fe;

FixedPoint FixedPoint::encode(double r, std::uint32_t frac_bits) {
    if (!(r >= 0.0) || r >= 256.0) throw CircuitError("fixed-point range is [0, 256)");
    const double scaled = r * static_cast<double>(1ull << frac_bits);
    return FixedPoint{Fe{static_cast<std::uint64_t>(std::llround(scaled))}, frac_bits};
}

double FixedPoint::decode() const {
    return static_cast<double>(raw.v) / static_cast<double>(1ull << frac_bits);
}

std::uint32_t input_scale_bits(std::uint32_t frac_bits) { return 2 * frac_bits; }
std::uint32_t output_scale_bits(std::uint32_t frac_bits) { return 6 * frac_bits; }

double decode_output(std::uint64_t raw, std::uint32_t frac_bits) {
    return static_cast<double>(raw) / std::exp2(static_cast<double>(output_scale_bits(frac_bits)));
}

bool R1CSSystem::row_satisfied(std::size_t i, const std::vector<std::uint64_t>& z) const {
    const Constraint& row = constraints[i];
    auto dot = [&](const std::vector<LinTerm>& terms) {
        Fe acc{0};
        for (const LinTerm& t : terms) acc = field::add(acc, field::mul(t.coeff, Fe{z[t.var]}));
        return acc;
    };
    return field::mul(dot(row.a), dot(row.b)) == dot(row.c);
}

bool R1CSSystem::satisfied(const std::vector<std::uint64_t>& z, std::size_t* first_violated) const {
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        if (!row_satisfied(i, z)) {
            if (first_violated) *first_violated = i;
            return false;
        }
    }
    return true;
}

std::size_t R1CSSystem::count_violations(const std::vector<std::uint64_t>& z) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < constraints.size(); ++i)
        if (!row_satisfied(i, z)) ++k;
    return k;
}

std::vector<std::uint8_t> R1CSSystem::serialize() const {
    ByteWriter w;
    w.magic("R1CS");
    w.u32(1);
    w.u64(num_vars);
    w.u64(num_public);
    w.u64(constraints.size());
    auto put_terms = [&](const std::vector<LinTerm>& terms) {
        w.u64(terms.size());
        for (const LinTerm& t : terms) {
            w.u64(t.var);
            w.u64(t.coeff.v);
        }
    };
    for (const Constraint& row : constraints) {
        put_terms(row.a);
        put_terms(row.b);
        put_terms(row.c);
    }
    return w.take();
}

Digest R1CSSystem::digest() const { return sha256(serialize()); }

std::vector<std::uint8_t> Statement::serialize() const {
    ByteWriter w;
    w.magic("SCST");
    w.u32(1);
    w.u32(spec.num);
    w.u32(spec.den);
    w.u32(frac_bits);
    w.u32(width);
    w.u32(height);
    w.u32(channels);
    w.u64(outputs.size());
    for (std::uint64_t v : outputs) w.u64(v);
    w.raw(input_digest);
    return w.take();
}

Statement Statement::deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic("SCST");
    if (r.u32() != 1) throw ParseError("unsupported statement version", 4);
    Statement st;
    st.spec.num = r.u32();
    st.spec.den = r.u32();
    st.frac_bits = r.u32();
    st.width = r.u32();
    st.height = r.u32();
    st.channels = r.u32();
    const std::uint64_t n = r.u64();
    if (n > (1ull << 32)) throw ParseError("implausible output count", r.pos());
    st.outputs.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) st.outputs[i] = r.u64();
    r.raw(st.input_digest);
    r.expect_done();
    return st;
}

namespace {

struct Tap {
    std::uint64_t var;
    std::uint64_t weight;  // at scale 2^(2*frac_bits), times any folded carry
};

// Quantized 1-D taps for one output coordinate: (index, weight at 2^F) pairs.
struct AxisTaps {
    int lo, hi;
    std::uint64_t w_lo, w_hi;  // w_lo + w_hi == 2^F
};

AxisTaps quantize_axis(const AxisSample& s, std::uint32_t frac_bits) {
    const std::uint64_t one = 1ull << frac_bits;
    AxisTaps t{s.lo, s.hi, one, 0};
    if (s.hi != s.lo) {
        t.w_hi = static_cast<std::uint64_t>(std::llround(s.frac * static_cast<double>(one)));
        t.w_lo = one - t.w_hi;
    }
    return t;
}

class Builder {
public:
    Builder(R1CSSystem& sys) : sys_(sys), next_var_(sys.num_vars) {}

    std::uint64_t alloc() { return next_var_++; }

    // dst = sum of weight * src; one product row per tap plus a summation row,
    // collapsed to a single row when there is only one tap.
    void emit_weighted_sum(const std::vector<Tap>& taps, std::uint64_t dst) {
        if (taps.size() == 1) {
            sys_.constraints.push_back(
                {{{taps[0].var, Fe{taps[0].weight}}}, {{0, Fe{1}}}, {{dst, Fe{1}}}});
            return;
        }
        Constraint sum;
        for (const Tap& t : taps) {
            const std::uint64_t tv = alloc();
            sys_.constraints.push_back({{{t.var, Fe{t.weight}}}, {{0, Fe{1}}}, {{tv, Fe{1}}}});
            sum.a.push_back({tv, Fe{1}});
        }
        sum.b = {{0, Fe{1}}};
        sum.c = {{dst, Fe{1}}};
        sys_.constraints.push_back(std::move(sum));
    }

    void finish() { sys_.num_vars = next_var_; }

private:
    R1CSSystem& sys_;
    std::uint64_t next_var_;
};

std::vector<Tap> pixel_taps(const AxisTaps& tx, const AxisTaps& ty, std::uint64_t carry,
                            const std::vector<std::uint64_t>& src_vars, int src_w) {
    auto var_at = [&](int x, int y) { return src_vars[static_cast<std::size_t>(y) * src_w + x]; };
    std::vector<Tap> taps;
    const std::pair<int, std::uint64_t> xs[2] = {{tx.lo, tx.w_lo}, {tx.hi, tx.w_hi}};
    const std::pair<int, std::uint64_t> ys[2] = {{ty.lo, ty.w_lo}, {ty.hi, ty.w_hi}};
    for (const auto& [yy, wy] : ys) {
        if (wy == 0) continue;
        for (const auto& [xx, wx] : xs) {
            if (wx == 0) continue;
            taps.push_back({var_at(xx, yy), wx * wy * carry});
        }
    }
    return taps;
}

}  // namespace

R1CSSystem extract_circuit(const defense::TransformSpec& spec, int width, int height, int channels,
                           std::uint32_t frac_bits) {
    if (width < 1 || height < 1 || channels < 1) throw DimensionError("circuit dims must be >= 1");
    if (frac_bits < 1 || frac_bits > 10) throw CircuitError("frac_bits must lie in [1, 10]");
    if ((1ull << frac_bits) % spec.den != 0)
        throw CircuitError("transform scale denominator " + std::to_string(spec.den) +
                           " not representable with " + std::to_string(frac_bits) + " frac bits");

    R1CSSystem sys;
    sys.spec = spec;
    sys.frac_bits = frac_bits;
    sys.width = static_cast<std::uint32_t>(width);
    sys.height = static_cast<std::uint32_t>(height);
    sys.channels = static_cast<std::uint32_t>(channels);

    const std::uint64_t n_pix = static_cast<std::uint64_t>(width) * height * channels;
    sys.num_public = 1 + n_pix;          // constant one + public outputs
    const std::uint64_t in_base = sys.num_public;
    sys.num_vars = sys.num_public + n_pix;  // inputs; intermediates appended by the builder

    const int mid_w = defense::scaled_dim(width, spec);
    const int mid_h = defense::scaled_dim(height, spec);
    const bool identity = (mid_w == width && mid_h == height);
    const std::uint64_t stage_one = 1ull << (2 * frac_bits);

    std::vector<AxisTaps> down_x(mid_w), down_y(mid_h), up_x(width), up_y(height);
    for (int x = 0; x < mid_w; ++x) down_x[x] = quantize_axis(axis_sample(x, width, mid_w), frac_bits);
    for (int y = 0; y < mid_h; ++y) down_y[y] = quantize_axis(axis_sample(y, height, mid_h), frac_bits);
    for (int x = 0; x < width; ++x) up_x[x] = quantize_axis(axis_sample(x, mid_w, width), frac_bits);
    for (int y = 0; y < height; ++y) up_y[y] = quantize_axis(axis_sample(y, mid_h, height), frac_bits);

    Builder b(sys);
    auto pix_var = [&](std::uint64_t base, int x, int y, int c, int w) {
        return base + (static_cast<std::uint64_t>(y) * w + x) * channels + c;
    };

    for (int c = 0; c < channels; ++c) {
        std::vector<std::uint64_t> in_vars(static_cast<std::size_t>(width) * height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                in_vars[static_cast<std::size_t>(y) * width + x] = pix_var(in_base, x, y, c, width);

        if (identity) {
            // Both stages collapse: out = 2^(4F) * in, one row per pixel.
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x)
                    sys.constraints.push_back(
                        {{{in_vars[static_cast<std::size_t>(y) * width + x], Fe{stage_one * stage_one}}},
                         {{0, Fe{1}}},
                         {{pix_var(1, x, y, c, width), Fe{1}}}});
            continue;
        }

        std::vector<std::uint64_t> mid_vars(static_cast<std::size_t>(mid_w) * mid_h);
        for (auto& v : mid_vars) v = b.alloc();
        for (int y = 0; y < mid_h; ++y)
            for (int x = 0; x < mid_w; ++x)
                b.emit_weighted_sum(pixel_taps(down_x[x], down_y[y], 1, in_vars, width),
                                    mid_vars[static_cast<std::size_t>(y) * mid_w + x]);

        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                b.emit_weighted_sum(pixel_taps(up_x[x], up_y[y], 1, mid_vars, mid_w),
                                    pix_var(1, x, y, c, width));
    }
    b.finish();
    return sys;
}

std::pair<Statement, Witness> gen_witness(const R1CSSystem& system, const Tensor& image) {
    if (image.width() != static_cast<int>(system.width) ||
        image.height() != static_cast<int>(system.height) ||
        image.channels() != static_cast<int>(system.channels))
        throw DimensionError("image dims do not match circuit dims");

    const std::uint32_t in_bits = input_scale_bits(system.frac_bits);
    std::vector<std::uint64_t> z(system.num_vars, 0);
    z[0] = 1;

    HashInput commit;
    commit.str("in:");
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double v = image.data()[i];
        if (!(v >= 0.0) || v > 1.0) throw CircuitError("pixel values must lie in [0, 1]");
        const std::uint64_t enc =
            static_cast<std::uint64_t>(std::llround(v * static_cast<double>(1ull << in_bits)));
        z[system.num_public + i] = enc;
        commit.u64(enc);
    }

    // Constraints are emitted in topological order: each row's C side names a
    // single fresh variable computable from its A side.
    for (const Constraint& row : system.constraints) {
        Fe acc{0};
        for (const LinTerm& t : row.a) acc = field::add(acc, field::mul(t.coeff, Fe{z[t.var]}));
        z[row.c[0].var] = acc.v;
    }

    Statement st;
    st.spec = system.spec;
    st.frac_bits = system.frac_bits;
    st.width = system.width;
    st.height = system.height;
    st.channels = system.channels;
    st.outputs.assign(z.begin() + 1, z.begin() + system.num_public);
    st.input_digest = commit.digest();

    Witness w;
    w.values.assign(z.begin() + system.num_public, z.end());
    return {std::move(st), std::move(w)};
}

std::vector<std::uint64_t> full_assignment(const R1CSSystem& system, const Statement& statement,
                                           const Witness& witness) {
    if (statement.outputs.size() != system.num_outputs() ||
        witness.values.size() != system.num_private())
        throw DimensionError("assignment pieces do not match circuit layout");
    std::vector<std::uint64_t> z;
    z.reserve(system.num_vars);
    z.push_back(1);
    z.insert(z.end(), statement.outputs.begin(), statement.outputs.end());
    z.insert(z.end(), witness.values.begin(), witness.values.end());
    return z;
}

}  // namespace ssc::circuit
