#pragma once

#include <string>

#include "ssc/tensor.hpp"

namespace ssc::procedural {

enum class Kind { Gradient, Checkerboard, GaussianBlobs };

Kind kind_from_name(const std::string& name);
const char* kind_name(Kind kind);

// Deterministic in (kind, seed, size); all pixels in [0,1].
Tensor generate(Kind kind, std::uint64_t seed, std::size_t size);

// Cycles through the three kinds by seed, for experiment batches.
Tensor generate_any(std::uint64_t seed, std::size_t size);

}  // namespace ssc::procedural
